#include "lnsim/csv.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

namespace lnsim::csv {
namespace {

std::vector<std::string> split_line(std::string_view line, bool& unterminated) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"' && cur.empty()) {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(std::move(cur));
  unterminated = quoted;
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

Reader::Reader(std::string text, std::string name) : name_(std::move(name)) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line(text.data() + pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const std::string_view stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') {
      if (end == text.size()) break;
      continue;
    }
    bool unterminated = false;
    auto fields = split_line(line, unterminated);
    if (unterminated) fail(line_no, "unterminated quoted field");
    for (auto& f : fields) f = std::string(trim(f));
    if (!have_header) {
      header_ = std::move(fields);
      have_header = true;
    } else {
      if (fields.size() != header_.size()) {
        fail(line_no, fmt::format("expected {} fields, found {}", header_.size(), fields.size()));
      }
      records_.push_back(Record{line_no, std::move(fields)});
    }
    if (end == text.size()) break;
  }
  if (!have_header) fail(0, "missing header row");
}

Reader Reader::open(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, 0, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return Reader(buf.str(), path);
}

Reader Reader::from_string(std::string text, std::string name) {
  return Reader(std::move(text), std::move(name));
}

std::optional<std::size_t> Reader::find_column(std::string_view name) const {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t Reader::column(std::string_view name) const {
  if (auto c = find_column(name)) return *c;
  fail(1, fmt::format("missing column '{}'", name));
}

void Reader::fail(std::size_t line, const std::string& what) const {
  throw ParseError(name_, line, what);
}

std::int64_t Reader::parse_int(const Record& rec, std::size_t col, std::string_view what) const {
  const std::string& s = rec.fields.at(col);
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    fail(rec.line, fmt::format("invalid integer for {}: '{}'", what, s));
  }
  return value;
}

std::optional<std::int64_t> Reader::parse_optional_int(const Record& rec, std::size_t col,
                                                       std::string_view what) const {
  if (rec.fields.at(col).empty()) return std::nullopt;
  return parse_int(rec, col, what);
}

double Reader::parse_double(const Record& rec, std::size_t col, std::string_view what) const {
  const std::string& s = rec.fields.at(col);
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(rec.line, fmt::format("invalid number for {}: '{}'", what, s));
  }
}

bool Reader::parse_bool(const Record& rec, std::size_t col, std::string_view what) const {
  const std::string& s = rec.fields.at(col);
  if (s == "0" || s == "false" || s == "False") return false;
  if (s == "1" || s == "true" || s == "True") return true;
  fail(rec.line, fmt::format("invalid flag for {}: '{}' (expected 0 or 1)", what, s));
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i != 0) out << ',';
    out << escape(fields[i]);
  }
  out << '\n';
}

std::string format_sat(Millisat msat) {
  const bool negative = msat < 0;
  std::uint64_t mag = negative ? static_cast<std::uint64_t>(-(msat + 1)) + 1 : static_cast<std::uint64_t>(msat);
  const std::uint64_t tenths = (mag + 50) / 100;
  return fmt::format("{}{}.{}", negative && tenths != 0 ? "-" : "", tenths / 10, tenths % 10);
}

std::string format_fixed(double value, int decimals) {
  if (value == 0.0) value = 0.0;  // drop negative zero
  return fmt::format("{:.{}f}", value, decimals);
}

}  // namespace lnsim::csv
