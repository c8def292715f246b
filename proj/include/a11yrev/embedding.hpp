#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace a11yrev {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// A sentence-embedding model. Implementations must return exactly dim()
// finite values and be deterministic for a given instance and input.
// embed() may be called concurrently unless thread_safe() is false.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::string name() const = 0;
  virtual std::size_t dim() const = 0;
  virtual std::vector<double> embed(std::string_view text) const = 0;

  // Default: one embed() per text.
  virtual std::vector<std::vector<double>> embed_many(std::span<const std::string> texts) const;

  virtual bool thread_safe() const { return true; }
};

using ProviderPtr = std::shared_ptr<const EmbeddingProvider>;

// Signed feature hashing over normalized tokens: FNV-1a 64 of the seed (8
// bytes, little-endian) followed by the token bytes picks bucket hash % dim;
// bit 63 picks the sign. The result is L2-normalized unless all zero.
std::vector<double> hash_embed(std::string_view text, std::size_t dim, std::uint64_t seed);

class HashEmbeddingProvider final : public EmbeddingProvider {
 public:
  HashEmbeddingProvider(std::size_t dim, std::uint64_t seed);

  std::string name() const override;
  std::size_t dim() const override { return dim_; }
  std::vector<double> embed(std::string_view text) const override;

 private:
  std::size_t dim_;
  std::uint64_t seed_;
};

// Talks to an embedding HTTP service: POST {"texts": [...]} to the URL,
// expects {"vectors": [[...], ...], "dim": D}. The dimension is fixed at
// construction (either given or probed with one request).
class ServiceEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit ServiceEmbeddingProvider(std::string url, std::size_t dim = 0, int timeout_seconds = 120);

  std::string name() const override { return "service:" + url_; }
  std::size_t dim() const override { return dim_; }
  std::vector<double> embed(std::string_view text) const override;
  std::vector<std::vector<double>> embed_many(std::span<const std::string> texts) const override;

 private:
  std::vector<std::vector<double>> request(std::span<const std::string> texts) const;

  std::string url_;
  std::string origin_;
  std::string path_;
  int timeout_seconds_;
  std::size_t dim_ = 0;
};

struct EmbeddingVector {
  std::vector<double> values;

  std::size_t dim() const noexcept { return values.size(); }
};

// Concatenates provider outputs in construction order.
class ConcatEmbedder {
 public:
  explicit ConcatEmbedder(std::vector<ProviderPtr> providers);

  std::size_t total_dim() const noexcept { return total_dim_; }
  const std::vector<ProviderPtr>& providers() const noexcept { return providers_; }

  // Throws InvalidArgument on text that is empty after trimming; provider
  // failures are rethrown as Provider errors carrying the provider name.
  EmbeddingVector embed(std::string_view text) const;

  // Row i is embed(texts[i]).
  Matrix embed_batch(std::span<const std::string> texts) const;

 private:
  std::vector<ProviderPtr> providers_;
  std::size_t total_dim_ = 0;
};

// Providers for a spec string: "hash" (384 + 768 hash providers),
// "hash:<dim>", "service:<url>", "local:<path>", or a comma-separated list of
// these concatenated in order. Hash providers take seed + position.
ConcatEmbedder make_embedder(std::string_view spec, std::uint64_t seed);

// Default layout: a 384-dim provider followed by a 768-dim provider.
inline constexpr std::size_t kFirstProviderDim = 384;
inline constexpr std::size_t kSecondProviderDim = 768;

struct EmbeddingCache {
  std::size_t dim = 0;
  std::vector<std::string> ids;
  Matrix vectors;
};

// Header line "dim=<D>", then "<id>\t<v1> <v2> ..." with 17 significant
// digits per value.
void save_embedding_cache(const EmbeddingCache& cache, const std::filesystem::path& path);
EmbeddingCache load_embedding_cache(const std::filesystem::path& path);

// Rows of the cache in the order of `ids`; throws NotFound on a missing id.
Matrix select_rows(const EmbeddingCache& cache, std::span<const std::string> ids);

}  // namespace a11yrev
