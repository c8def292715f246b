#include "a11yrev/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

#include "a11yrev/error.hpp"
#include "rng.hpp"

namespace a11yrev {
namespace {

using json = nlohmann::json;

std::string record_ref(std::size_t record) { return "record " + std::to_string(record); }

std::string lower_ascii(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::optional<int> parse_label(const std::string& field, std::size_t record) {
  const std::string value = trim(field);
  if (value.empty()) return std::nullopt;
  if (value == "0") return 0;
  if (value == "1") return 1;
  fail(ErrorCode::Format, record_ref(record) + ": label '" + value + "' is outside {0,1}");
}

ReviewSource parse_source(const std::string& field, std::size_t record) {
  const std::string value = lower_ascii(trim(field));
  if (value.empty() || value == "imported") return ReviewSource::Imported;
  if (value == "crawled") return ReviewSource::Crawled;
  fail(ErrorCode::Format, record_ref(record) + ": unknown source '" + value + "'");
}

void finish_dataset(LabeledDataset& dataset) {
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < dataset.reviews.size(); ++i) {
    Review& review = dataset.reviews[i];
    if (review.id.empty()) review.id = std::to_string(i);
    if (review.raw_text.empty()) {
      fail(ErrorCode::Format, record_ref(i + 1) + ": review text is empty");
    }
    if (!seen.insert(review.id).second) {
      fail(ErrorCode::Format, record_ref(i + 1) + ": duplicate id '" + review.id + "'");
    }
  }
}

// RFC 4180 records: quoted fields may hold commas, doubled quotes and line
// breaks. Returns false at end of input.
class CsvReader {
 public:
  explicit CsvReader(std::string_view input) : input_(input) {
    if (input_.starts_with("\xEF\xBB\xBF")) pos_ = 3;
  }

  bool next(std::vector<std::string>& fields) {
    fields.clear();
    // Skip blank lines between records.
    while (pos_ < input_.size() && (input_[pos_] == '\n' || input_[pos_] == '\r')) ++pos_;
    if (pos_ >= input_.size()) return false;
    ++record_;
    std::string field;
    bool quoted = false;
    bool was_quoted = false;
    while (pos_ < input_.size()) {
      const char c = input_[pos_++];
      if (quoted) {
        if (c == '"') {
          if (pos_ < input_.size() && input_[pos_] == '"') {
            field.push_back('"');
            ++pos_;
          } else {
            quoted = false;
          }
        } else {
          field.push_back(c);
        }
        continue;
      }
      if (c == '"') {
        if (!field.empty() || was_quoted) {
          fail(ErrorCode::Format, "line record " + std::to_string(record_) +
                                      ": stray quote inside unquoted field");
        }
        quoted = true;
        was_quoted = true;
      } else if (c == ',') {
        fields.push_back(std::move(field));
        field.clear();
        was_quoted = false;
      } else if (c == '\n' || c == '\r') {
        if (c == '\r' && pos_ < input_.size() && input_[pos_] == '\n') ++pos_;
        break;
      } else {
        if (was_quoted) {
          fail(ErrorCode::Format, "line record " + std::to_string(record_) +
                                      ": characters after closing quote");
        }
        field.push_back(c);
      }
    }
    if (quoted) {
      fail(ErrorCode::Format, "line record " + std::to_string(record_) + ": unterminated quote");
    }
    fields.push_back(std::move(field));
    return true;
  }

 private:
  std::string_view input_;
  std::size_t pos_ = 0;
  std::size_t record_ = 0;
};

LabeledDataset parse_table(const std::string& content) {
  CsvReader reader(content);
  std::vector<std::string> fields;
  if (!reader.next(fields)) fail(ErrorCode::Format, "missing header row");

  std::unordered_map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < fields.size(); ++i) column.emplace(lower_ascii(trim(fields[i])), i);
  auto find = [&](std::initializer_list<const char*> names) -> std::optional<std::size_t> {
    for (const char* name : names) {
      if (auto it = column.find(name); it != column.end()) return it->second;
    }
    return std::nullopt;
  };
  const auto text_col = find({"text", "review", "content"});
  if (!text_col) fail(ErrorCode::Format, "header has no 'text' column");
  const auto id_col = find({"id"});
  const auto app_col = find({"app_name", "app"});
  const auto source_col = find({"source"});
  const auto label_col = find({"label"});
  const auto raw_col = find({"raw_text"});

  LabeledDataset dataset;
  std::size_t record = 0;
  while (reader.next(fields)) {
    ++record;
    if (fields.size() != column.size()) {
      fail(ErrorCode::Format, record_ref(record) + ": expected " + std::to_string(column.size()) +
                                  " fields, found " + std::to_string(fields.size()));
    }
    Review review;
    if (id_col) review.id = trim(fields[*id_col]);
    if (app_col) review.app_name = fields[*app_col];
    if (source_col) review.source = parse_source(fields[*source_col], record);
    review.text = fields[*text_col];
    review.raw_text = raw_col ? fields[*raw_col] : review.text;
    if (label_col) review.label = parse_label(fields[*label_col], record);
    dataset.reviews.push_back(std::move(review));
  }
  finish_dataset(dataset);
  return dataset;
}

std::string json_string_field(const json& object, const char* key, std::size_t record) {
  auto it = object.find(key);
  if (it == object.end() || it->is_null()) return {};
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  fail(ErrorCode::Format, record_ref(record) + ": field '" + key + "' must be a string");
}

LabeledDataset parse_lines(const std::string& content) {
  LabeledDataset dataset;
  std::istringstream stream(content);
  std::string line;
  std::size_t record = 0;
  while (std::getline(stream, line)) {
    if (trim(line).empty()) continue;
    ++record;
    json object;
    try {
      object = json::parse(line);
    } catch (const json::parse_error& e) {
      fail(ErrorCode::Format, record_ref(record) + ": " + e.what());
    }
    if (!object.is_object()) fail(ErrorCode::Format, record_ref(record) + ": not a JSON object");
    if (!object.contains("text")) fail(ErrorCode::Format, record_ref(record) + ": missing 'text'");

    Review review;
    review.id = json_string_field(object, "id", record);
    review.app_name = json_string_field(object, "app_name", record);
    review.source = parse_source(json_string_field(object, "source", record), record);
    // Crawler output carries fetched_at instead of a source column.
    if (!object.contains("source") && object.contains("fetched_at")) review.source = ReviewSource::Crawled;
    review.text = json_string_field(object, "text", record);
    review.raw_text =
        object.contains("raw_text") ? json_string_field(object, "raw_text", record) : review.text;
    if (auto it = object.find("label"); it != object.end() && !it->is_null()) {
      if (it->is_number_integer()) {
        const auto value = it->get<long long>();
        if (value != 0 && value != 1) {
          fail(ErrorCode::Format,
               record_ref(record) + ": label '" + std::to_string(value) + "' is outside {0,1}");
        }
        review.label = static_cast<int>(value);
      } else if (it->is_string()) {
        review.label = parse_label(it->get<std::string>(), record);
      } else {
        fail(ErrorCode::Format, record_ref(record) + ": label must be an integer");
      }
    }
    dataset.reviews.push_back(std::move(review));
  }
  finish_dataset(dataset);
  return dataset;
}

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\r\n") == std::string::npos) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

bool needs_raw_column(const LabeledDataset& dataset) {
  return std::any_of(dataset.reviews.begin(), dataset.reviews.end(),
                     [](const Review& r) { return r.raw_text != r.text; });
}

void require_labels(const LabeledDataset& dataset, const char* operation) {
  for (std::size_t i = 0; i < dataset.reviews.size(); ++i) {
    if (!dataset.reviews[i].label) {
      fail(ErrorCode::Data, std::string(operation) + ": review '" + dataset.reviews[i].id +
                                "' has no label");
    }
  }
}

}  // namespace

const char* to_string(ReviewSource source) noexcept {
  return source == ReviewSource::Crawled ? "crawled" : "imported";
}

bool LabeledDataset::fully_labeled() const noexcept {
  return std::all_of(reviews.begin(), reviews.end(), [](const Review& r) { return r.label.has_value(); });
}

DatasetFormat format_for_path(const std::filesystem::path& path) {
  const std::string ext = lower_ascii(path.extension().string());
  if (ext == ".jsonl" || ext == ".ndjson" || ext == ".json") return DatasetFormat::LineRecords;
  return DatasetFormat::DelimitedTable;
}

LabeledDataset parse_reviews(const std::string& content, DatasetFormat format) {
  return format == DatasetFormat::DelimitedTable ? parse_table(content) : parse_lines(content);
}

LabeledDataset load_reviews(const std::filesystem::path& path, DatasetFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot read dataset '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  LabeledDataset dataset;
  try {
    dataset = parse_reviews(buffer.str(), format);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
  dataset.provenance = path.string();
  return dataset;
}

std::string serialize_reviews(const LabeledDataset& dataset, DatasetFormat format) {
  std::string out;
  const bool raw_column = needs_raw_column(dataset);
  if (format == DatasetFormat::DelimitedTable) {
    out = raw_column ? "id,app_name,source,text,label,raw_text\n" : "id,app_name,source,text,label\n";
    for (const Review& r : dataset.reviews) {
      out += csv_field(r.id);
      out += ',';
      out += csv_field(r.app_name);
      out += ',';
      out += to_string(r.source);
      out += ',';
      out += csv_field(r.text);
      out += ',';
      if (r.label) out += std::to_string(*r.label);
      if (raw_column) {
        out += ',';
        out += csv_field(r.raw_text);
      }
      out += '\n';
    }
    return out;
  }
  for (const Review& r : dataset.reviews) {
    json object = json::object();
    object["id"] = r.id;
    object["app_name"] = r.app_name;
    object["source"] = to_string(r.source);
    object["text"] = r.text;
    object["label"] = r.label ? json(*r.label) : json(nullptr);
    if (raw_column) object["raw_text"] = r.raw_text;
    out += object.dump(-1, ' ', false, json::error_handler_t::replace);
    out += '\n';
  }
  return out;
}

void save_reviews(const LabeledDataset& dataset, const std::filesystem::path& path,
                  DatasetFormat format) {
  if (dataset.empty()) fail(ErrorCode::InvalidArgument, "refusing to save an empty dataset");
  const std::string content = serialize_reviews(dataset, format);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write dataset '" + path.string() + "'");
  out << content;
  if (!out.flush()) fail(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

Split stratified_split(const LabeledDataset& dataset, std::size_t test_count, std::uint64_t seed) {
  const std::size_t total = dataset.size();
  if (test_count == 0 || test_count >= total) {
    fail(ErrorCode::InvalidArgument, "test_count " + std::to_string(test_count) +
                                         " must lie strictly between 0 and " + std::to_string(total));
  }
  require_labels(dataset, "stratified_split");

  std::vector<std::size_t> positives;
  std::vector<std::size_t> negatives;
  for (std::size_t i = 0; i < total; ++i) {
    (*dataset.reviews[i].label == 1 ? positives : negatives).push_back(i);
  }

  const double share = static_cast<double>(test_count) * static_cast<double>(positives.size()) /
                       static_cast<double>(total);
  auto test_pos = static_cast<std::size_t>(std::llround(share));
  test_pos = std::min(test_pos, positives.size());
  if (test_count - test_pos > negatives.size()) test_pos = test_count - negatives.size();
  const std::size_t test_neg = test_count - test_pos;

  detail::Rng rng(seed);
  rng.shuffle(std::span(positives));
  rng.shuffle(std::span(negatives));

  std::vector<bool> in_test(total, false);
  for (std::size_t i = 0; i < test_pos; ++i) in_test[positives[i]] = true;
  for (std::size_t i = 0; i < test_neg; ++i) in_test[negatives[i]] = true;

  Split split;
  split.train_val.provenance = dataset.provenance + " [train_val seed=" + std::to_string(seed) + "]";
  split.test.provenance = dataset.provenance + " [test seed=" + std::to_string(seed) + "]";
  for (std::size_t i = 0; i < total; ++i) {
    (in_test[i] ? split.test : split.train_val).reviews.push_back(dataset.reviews[i]);
  }
  return split;
}

ClassBalance class_balance(const LabeledDataset& dataset) {
  if (dataset.empty()) fail(ErrorCode::Data, "class_balance: dataset is empty");
  require_labels(dataset, "class_balance");
  ClassBalance balance;
  balance.total = dataset.size();
  for (const Review& r : dataset.reviews) {
    if (*r.label == 1) {
      ++balance.positives;
    } else {
      ++balance.negatives;
    }
  }
  return balance;
}

}  // namespace a11yrev
