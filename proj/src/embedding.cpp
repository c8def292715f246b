#include "a11yrev/embedding.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "a11yrev/error.hpp"
#include "a11yrev/preprocess.hpp"
#include "httplib.h"
#include "json.hpp"

namespace a11yrev {
namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

bool blank(std::string_view text) { return text.find_first_not_of(" \t\r\n\f\v") == std::string_view::npos; }

void check_vector(const std::vector<double>& values, std::size_t dim, const std::string& provider) {
  if (values.size() != dim) {
    fail(ErrorCode::Provider, provider + ": returned " + std::to_string(values.size()) +
                                  " values, expected " + std::to_string(dim));
  }
  for (double v : values) {
    if (!std::isfinite(v)) fail(ErrorCode::Provider, provider + ": returned a non-finite value");
  }
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

std::size_t parse_dim(std::string_view text, std::string_view spec) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || value == 0) {
    fail(ErrorCode::InvalidArgument, "bad dimension in embedder spec '" + std::string(spec) + "'");
  }
  return value;
}

}  // namespace

std::vector<std::vector<double>> EmbeddingProvider::embed_many(std::span<const std::string> texts) const {
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& text : texts) out.push_back(embed(text));
  return out;
}

std::vector<double> hash_embed(std::string_view text, std::size_t dim, std::uint64_t seed) {
  if (dim == 0) fail(ErrorCode::InvalidArgument, "hash_embed: dim must be positive");
  if (blank(text)) fail(ErrorCode::InvalidArgument, "hash_embed: text is empty");

  std::uint64_t seeded = kFnvOffset;
  for (int byte = 0; byte < 8; ++byte) {
    seeded ^= (seed >> (8 * byte)) & 0xFFU;
    seeded *= kFnvPrime;
  }

  std::vector<double> values(dim, 0.0);
  for (const std::string& token : tokenize(text)) {
    std::uint64_t hash = seeded;
    for (unsigned char c : token) {
      hash ^= c;
      hash *= kFnvPrime;
    }
    values[hash % dim] += (hash >> 63) == 0 ? 1.0 : -1.0;
  }
  double norm = 0.0;
  for (double v : values) norm += v * v;
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (double& v : values) v /= norm;
  }
  return values;
}

HashEmbeddingProvider::HashEmbeddingProvider(std::size_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
  if (dim == 0) fail(ErrorCode::InvalidArgument, "hash provider dimension must be positive");
}

std::string HashEmbeddingProvider::name() const {
  return "hash:" + std::to_string(dim_) + "@" + std::to_string(seed_);
}

std::vector<double> HashEmbeddingProvider::embed(std::string_view text) const {
  return hash_embed(text, dim_, seed_);
}

ServiceEmbeddingProvider::ServiceEmbeddingProvider(std::string url, std::size_t dim, int timeout_seconds)
    : url_(std::move(url)), timeout_seconds_(timeout_seconds) {
  const auto scheme_end = url_.find("://");
  if (scheme_end == std::string::npos) {
    fail(ErrorCode::InvalidArgument, "embedding service URL needs a scheme: '" + url_ + "'");
  }
  const auto path_start = url_.find('/', scheme_end + 3);
  origin_ = url_.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : url_.substr(path_start);
  if (dim == 0) {
    const std::string probe = "probe";
    auto vectors = request(std::span(&probe, 1));
    dim = vectors.front().size();
    if (dim == 0) fail(ErrorCode::Provider, name() + ": service reported an empty vector");
  }
  dim_ = dim;
}

std::vector<std::vector<double>> ServiceEmbeddingProvider::request(std::span<const std::string> texts) const {
  nlohmann::json body;
  body["texts"] = std::vector<std::string>(texts.begin(), texts.end());
  httplib::Client client(origin_);
  client.set_connection_timeout(timeout_seconds_);
  client.set_read_timeout(timeout_seconds_);
  auto response = client.Post(path_, body.dump(), "application/json");
  if (!response) {
    fail(ErrorCode::Provider, name() + ": request failed (" + httplib::to_string(response.error()) + ")");
  }
  if (response->status != 200) {
    fail(ErrorCode::Provider, name() + ": HTTP status " + std::to_string(response->status));
  }
  std::vector<std::vector<double>> vectors;
  try {
    const auto reply = nlohmann::json::parse(response->body);
    vectors = reply.at("vectors").get<std::vector<std::vector<double>>>();
    if (reply.contains("dim")) {
      const auto reported = reply.at("dim").get<std::size_t>();
      for (const auto& v : vectors) {
        if (v.size() != reported) fail(ErrorCode::Provider, name() + ": vector length disagrees with dim");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Provider, name() + ": malformed response: " + e.what());
  }
  if (vectors.size() != texts.size()) {
    fail(ErrorCode::Provider, name() + ": expected " + std::to_string(texts.size()) + " vectors, got " +
                                  std::to_string(vectors.size()));
  }
  return vectors;
}

std::vector<double> ServiceEmbeddingProvider::embed(std::string_view text) const {
  const std::string owned(text);
  auto vectors = request(std::span(&owned, 1));
  return std::move(vectors.front());
}

std::vector<std::vector<double>> ServiceEmbeddingProvider::embed_many(std::span<const std::string> texts) const {
  constexpr std::size_t kChunk = 64;
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (std::size_t start = 0; start < texts.size(); start += kChunk) {
    auto chunk = request(texts.subspan(start, std::min(kChunk, texts.size() - start)));
    for (auto& v : chunk) out.push_back(std::move(v));
  }
  return out;
}

ConcatEmbedder::ConcatEmbedder(std::vector<ProviderPtr> providers) : providers_(std::move(providers)) {
  if (providers_.empty()) fail(ErrorCode::InvalidArgument, "embedder needs at least one provider");
  for (const auto& provider : providers_) {
    if (!provider || provider->dim() == 0) fail(ErrorCode::InvalidArgument, "invalid embedding provider");
    total_dim_ += provider->dim();
  }
}

EmbeddingVector ConcatEmbedder::embed(std::string_view text) const {
  if (blank(text)) fail(ErrorCode::InvalidArgument, "cannot embed empty text");
  EmbeddingVector out;
  out.values.reserve(total_dim_);
  for (const auto& provider : providers_) {
    std::vector<double> part;
    try {
      part = provider->embed(text);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::Provider) throw;
      throw Error(ErrorCode::Provider, provider->name() + ": " + e.what());
    } catch (const std::exception& e) {
      throw Error(ErrorCode::Provider, provider->name() + ": " + e.what());
    }
    check_vector(part, provider->dim(), provider->name());
    out.values.insert(out.values.end(), part.begin(), part.end());
  }
  return out;
}

Matrix ConcatEmbedder::embed_batch(std::span<const std::string> texts) const {
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (blank(texts[i])) fail(ErrorCode::InvalidArgument, "cannot embed empty text at index " + std::to_string(i));
  }
  Matrix out(static_cast<Eigen::Index>(texts.size()), static_cast<Eigen::Index>(total_dim_));
  Eigen::Index offset = 0;
  for (const auto& provider : providers_) {
    std::vector<std::vector<double>> rows;
    try {
      rows = provider->embed_many(texts);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::Provider) throw;
      throw Error(ErrorCode::Provider, provider->name() + ": " + e.what());
    } catch (const std::exception& e) {
      throw Error(ErrorCode::Provider, provider->name() + ": " + e.what());
    }
    if (rows.size() != texts.size()) fail(ErrorCode::Provider, provider->name() + ": wrong batch size");
    const auto width = static_cast<Eigen::Index>(provider->dim());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      check_vector(rows[i], provider->dim(), provider->name());
      out.row(static_cast<Eigen::Index>(i)).segment(offset, width) =
          Eigen::Map<const Eigen::RowVectorXd>(rows[i].data(), width);
    }
    offset += width;
  }
  return out;
}

ConcatEmbedder make_embedder(std::string_view spec, std::uint64_t seed) {
  std::vector<ProviderPtr> providers;
  std::uint64_t position = 0;
  std::string_view rest = spec;
  while (true) {
    const auto comma = rest.find(',');
    const std::string item = trim(rest.substr(0, comma));
    if (item == "hash") {
      providers.push_back(std::make_shared<HashEmbeddingProvider>(kFirstProviderDim, seed + position++));
      providers.push_back(std::make_shared<HashEmbeddingProvider>(kSecondProviderDim, seed + position++));
    } else if (item.starts_with("hash:")) {
      providers.push_back(
          std::make_shared<HashEmbeddingProvider>(parse_dim(item.substr(5), spec), seed + position++));
    } else if (item.starts_with("service:")) {
      providers.push_back(std::make_shared<ServiceEmbeddingProvider>(item.substr(8)));
    } else if (item.starts_with("local:")) {
      fail(ErrorCode::Provider, "local model runtime is not available in this build ('" + item +
                                    "'); serve the model over HTTP and use service:<url>");
    } else {
      fail(ErrorCode::InvalidArgument, "unknown embedder '" + item + "'");
    }
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return ConcatEmbedder(std::move(providers));
}

void save_embedding_cache(const EmbeddingCache& cache, const std::filesystem::path& path) {
  if (static_cast<std::size_t>(cache.vectors.cols()) != cache.dim ||
      static_cast<std::size_t>(cache.vectors.rows()) != cache.ids.size()) {
    fail(ErrorCode::InvalidArgument, "embedding cache shape does not match its ids/dim");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write embedding cache '" + path.string() + "'");
  out << "dim=" << cache.dim << '\n';
  char buffer[32];
  for (std::size_t i = 0; i < cache.ids.size(); ++i) {
    if (cache.ids[i].find_first_of("\t\n") != std::string::npos) {
      fail(ErrorCode::InvalidArgument, "review id '" + cache.ids[i] + "' contains a tab or newline");
    }
    out << cache.ids[i] << '\t';
    for (std::size_t j = 0; j < cache.dim; ++j) {
      std::snprintf(buffer, sizeof buffer, "%.17g", cache.vectors(static_cast<Eigen::Index>(i),
                                                                 static_cast<Eigen::Index>(j)));
      if (j) out << ' ';
      out << buffer;
    }
    out << '\n';
  }
  if (!out.flush()) fail(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

EmbeddingCache load_embedding_cache(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot read embedding cache '" + path.string() + "'");
  EmbeddingCache cache;
  std::string line;
  if (!std::getline(in, line) || !line.starts_with("dim=")) {
    fail(ErrorCode::Format, path.string() + ": missing 'dim=' header");
  }
  cache.dim = parse_dim(trim(std::string_view(line).substr(4)), line);
  std::vector<double> values;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) fail(ErrorCode::Format, path.string() + ":" + std::to_string(line_no) + ": no tab");
    cache.ids.push_back(line.substr(0, tab));
    std::istringstream fields(line.substr(tab + 1));
    std::size_t count = 0;
    std::string token;
    while (fields >> token) {
      char* end = nullptr;
      const double v = std::strtod(token.c_str(), &end);
      if (*end != '\0' || !std::isfinite(v)) {
        fail(ErrorCode::Format, path.string() + ":" + std::to_string(line_no) + ": bad value '" + token + "'");
      }
      values.push_back(v);
      ++count;
    }
    if (count != cache.dim) {
      fail(ErrorCode::Format, path.string() + ":" + std::to_string(line_no) + ": expected " +
                                  std::to_string(cache.dim) + " values, found " + std::to_string(count));
    }
  }
  cache.vectors = Eigen::Map<Matrix>(values.data(), static_cast<Eigen::Index>(cache.ids.size()),
                                     static_cast<Eigen::Index>(cache.dim));
  return cache;
}

Matrix select_rows(const EmbeddingCache& cache, std::span<const std::string> ids) {
  std::unordered_map<std::string, Eigen::Index> index;
  for (std::size_t i = 0; i < cache.ids.size(); ++i) index.emplace(cache.ids[i], static_cast<Eigen::Index>(i));
  Matrix out(static_cast<Eigen::Index>(ids.size()), static_cast<Eigen::Index>(cache.dim));
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto it = index.find(ids[i]);
    if (it == index.end()) fail(ErrorCode::NotFound, "no cached embedding for review '" + ids[i] + "'");
    out.row(static_cast<Eigen::Index>(i)) = cache.vectors.row(it->second);
  }
  return out;
}

}  // namespace a11yrev
