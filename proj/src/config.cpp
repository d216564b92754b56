#include "packetvision/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <set>

#include "packetvision/dataset.hpp"
#include "packetvision/error.hpp"
#include "packetvision/io.hpp"

namespace packetvision::config {

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Document run() {
    Document doc;
    Table* current = &doc.root;
    std::set<std::string, std::less<>> seen_tables;
    while (next_line()) {
      skip_ws();
      if (done_with_line()) continue;
      if (peek() == '[') {
        const bool array = line_.substr(pos_).starts_with("[[");
        pos_ += array ? 2 : 1;
        skip_ws();
        std::string name = parse_key();
        skip_ws();
        expect(array ? "]]" : "]");
        finish_line();
        if (doc.root.contains(name)) fail("'" + name + "' is already a key");
        if (array) {
          if (doc.tables.contains(name)) fail("'" + name + "' is already a table");
          auto& list = doc.table_arrays[name];
          list.emplace_back();
          current = &list.back();
        } else {
          if (!seen_tables.insert(name).second || doc.table_arrays.contains(name)) {
            fail("table '" + name + "' defined twice");
          }
          current = &doc.tables[name];
        }
        continue;
      }
      std::string key = parse_key();
      skip_ws();
      expect("=");
      skip_ws();
      Value value = parse_value();
      finish_line();
      if (!current->emplace(std::move(key), std::move(value)).second) {
        fail("duplicate key");
      }
    }
    return doc;
  }

 private:
  bool next_line() {
    if (cursor_ > text_.size()) return false;
    const auto end = text_.find('\n', cursor_);
    const auto stop = end == std::string_view::npos ? text_.size() : end;
    line_ = text_.substr(cursor_, stop - cursor_);
    if (!line_.empty() && line_.back() == '\r') line_.remove_suffix(1);
    cursor_ = stop + 1;
    pos_ = 0;
    ++line_no_;
    return true;
  }

  char peek() const { return pos_ < line_.size() ? line_[pos_] : '\0'; }

  void skip_ws() {
    while (pos_ < line_.size() && (line_[pos_] == ' ' || line_[pos_] == '\t')) {
      ++pos_;
    }
  }

  bool done_with_line() const { return pos_ >= line_.size() || line_[pos_] == '#'; }

  void finish_line() {
    skip_ws();
    if (!done_with_line()) fail("unexpected trailing characters");
  }

  void expect(std::string_view token) {
    if (line_.substr(pos_).starts_with(token)) {
      pos_ += token.size();
      return;
    }
    fail("expected '" + std::string(token) + "'");
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::InvalidConfig,
                "line " + std::to_string(line_no_) + ": " + what);
  }

  std::string parse_key() {
    if (peek() == '"') return parse_basic_string();
    const auto start = pos_;
    while (pos_ < line_.size()) {
      const char c = line_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') {
        ++pos_;
      } else {
        break;
      }
    }
    if (pos_ == start) fail("expected a key");
    if (peek() == '.') fail("dotted keys are not supported");
    return std::string(line_.substr(start, pos_ - start));
  }

  std::string parse_basic_string() {
    ++pos_;  // opening quote
    std::string out;
    while (pos_ < line_.size()) {
      const char c = line_[pos_++];
      if (c == '"') return out;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (pos_ >= line_.size()) break;
      switch (line_[pos_++]) {
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        default: fail("unsupported escape sequence");
      }
    }
    fail("unterminated string");
  }

  std::string parse_literal_string() {
    ++pos_;
    const auto end = line_.find('\'', pos_);
    if (end == std::string_view::npos) fail("unterminated string");
    std::string out(line_.substr(pos_, end - pos_));
    pos_ = end + 1;
    return out;
  }

  Value parse_value() {
    const char c = peek();
    if (c == '"') {
      if (line_.substr(pos_).starts_with("\"\"\"")) fail("multi-line strings are not supported");
      return parse_basic_string();
    }
    if (c == '\'') return parse_literal_string();
    if (c == '[' || c == '{') fail("arrays and inline tables are not supported");

    const auto start = pos_;
    while (pos_ < line_.size() && line_[pos_] != '#' && line_[pos_] != ' ' &&
           line_[pos_] != '\t') {
      ++pos_;
    }
    std::string token(line_.substr(start, pos_ - start));
    if (token == "true") return true;
    if (token == "false") return false;
    if (token.empty()) fail("missing value");

    std::string digits;
    for (const char ch : token) {
      if (ch != '_') digits.push_back(ch);
    }
    const bool is_float = digits.find_first_of(".eE") != std::string::npos ||
                          digits == "inf" || digits == "+inf" || digits == "-inf" ||
                          digits == "nan";
    if (!is_float) {
      std::int64_t v = 0;
      const char* first = digits.data();
      const char* last = digits.data() + digits.size();
      if (*first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc{} || ptr != last) fail("invalid value '" + token + "'");
      return v;
    }
    char* end = nullptr;
    const double v = std::strtod(digits.c_str(), &end);
    if (end != digits.c_str() + digits.size()) fail("invalid value '" + token + "'");
    return v;
  }

  std::string_view text_;
  std::string_view line_;
  std::size_t cursor_ = 0;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

template <typename T>
const T* get_if_key(const Table& table, std::string_view key) {
  const auto it = table.find(key);
  return it == table.end() ? nullptr : std::get_if<T>(&it->second);
}

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorCode::InvalidConfig, what);
}

void reject_unknown_keys(const Table& table, std::set<std::string_view> known,
                         const std::string& where) {
  for (const auto& [key, _] : table) {
    if (!known.contains(key)) config_error("unknown key '" + key + "' in " + where);
  }
}

}  // namespace

Document parse_toml(std::string_view text) { return Parser(text).run(); }

void validate(const BuildConfig& config) {
  if (config.inputs.empty()) config_error("at least one [[input]] is required");
  if (config.output_dir.empty()) config_error("output_dir is required");
  if (!(config.lambda >= 0.0) || !std::isfinite(config.lambda)) {
    config_error("lambda must be finite and >= 0");
  }
  for (const auto& in : config.inputs) {
    if (in.path.empty()) config_error("input path is empty");
    if (!dataset::is_valid_class_name(in.label)) {
      config_error("invalid class label '" + in.label + "'");
    }
    if (in.max_packets && *in.max_packets < 1) {
      config_error("max_packets must be >= 1 for " + in.path.string());
    }
  }
}

BuildConfig parse_build_config(std::string_view toml_text,
                               const std::filesystem::path& base_dir) {
  const Document doc = parse_toml(toml_text);
  if (!doc.tables.empty()) {
    config_error("unexpected table [" + doc.tables.begin()->first + "]");
  }
  for (const auto& [name, _] : doc.table_arrays) {
    if (name != "input") config_error("unexpected table array [[" + name + "]]");
  }
  reject_unknown_keys(doc.root, {"output_dir", "global_seed", "lambda"}, "top level");

  BuildConfig cfg;
  cfg.base_dir = base_dir;
  if (const auto* out = get_if_key<std::string>(doc.root, "output_dir")) {
    cfg.output_dir = *out;
  } else {
    config_error("output_dir must be a string");
  }
  if (doc.root.contains("global_seed")) {
    const auto* seed = get_if_key<std::int64_t>(doc.root, "global_seed");
    if (!seed || *seed < 0) config_error("global_seed must be a non-negative integer");
    cfg.global_seed = static_cast<std::uint64_t>(*seed);
  }
  if (doc.root.contains("lambda")) {
    if (const auto* f = get_if_key<double>(doc.root, "lambda")) {
      cfg.lambda = *f;
    } else if (const auto* i = get_if_key<std::int64_t>(doc.root, "lambda")) {
      cfg.lambda = static_cast<double>(*i);
    } else {
      config_error("lambda must be a number");
    }
  }

  if (const auto it = doc.table_arrays.find("input"); it != doc.table_arrays.end()) {
    for (const auto& table : it->second) {
      reject_unknown_keys(table, {"path", "label", "max_packets"}, "[[input]]");
      InputSpec in;
      const auto* path = get_if_key<std::string>(table, "path");
      const auto* label = get_if_key<std::string>(table, "label");
      if (!path) config_error("[[input]] needs a string 'path'");
      if (!label) config_error("[[input]] needs a string 'label'");
      in.path = *path;
      in.label = *label;
      if (table.contains("max_packets")) {
        const auto* cap = get_if_key<std::int64_t>(table, "max_packets");
        if (!cap || *cap < 1) config_error("max_packets must be an integer >= 1");
        in.max_packets = static_cast<std::uint64_t>(*cap);
      }
      cfg.inputs.push_back(std::move(in));
    }
  }
  validate(cfg);
  return cfg;
}

BuildConfig load_build_config(const std::filesystem::path& path) {
  const std::string text = io::read_text_file(path);
  return parse_build_config(text, path.parent_path());
}

}  // namespace packetvision::config
