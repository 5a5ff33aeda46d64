#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lnsim/types.hpp"

namespace lnsim::csv {

/// One parsed record with the 1-based line it came from.
struct Record {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

/// Header-aware reader for the small comma separated formats used by the
/// tool. Supports double-quoted fields (with "" escapes), CRLF line endings,
/// blank lines, and '#' comment lines.
class Reader {
 public:
  /// Reads the whole file. Throws ParseError when it cannot be opened.
  static Reader open(const std::string& path);
  static Reader from_string(std::string text, std::string name = "<memory>");

  const std::string& name() const noexcept { return name_; }
  const std::vector<std::string>& header() const noexcept { return header_; }
  const std::vector<Record>& records() const noexcept { return records_; }

  /// Column position by name, or ParseError naming the missing column.
  std::size_t column(std::string_view name) const;
  std::optional<std::size_t> find_column(std::string_view name) const;

  [[noreturn]] void fail(std::size_t line, const std::string& what) const;

  std::int64_t parse_int(const Record& rec, std::size_t col, std::string_view what) const;
  std::optional<std::int64_t> parse_optional_int(const Record& rec, std::size_t col,
                                                 std::string_view what) const;
  double parse_double(const Record& rec, std::size_t col, std::string_view what) const;
  bool parse_bool(const Record& rec, std::size_t col, std::string_view what) const;

 private:
  Reader(std::string text, std::string name);

  std::string name_;
  std::vector<std::string> header_;
  std::vector<Record> records_;
};

/// Quotes a field when it contains a separator, quote, or newline.
std::string escape(std::string_view field);

/// Writes a comma-joined line terminated by '\n'.
void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Satoshi amount with one decimal, rounded half away from zero, computed
/// from integer millisatoshi so the text is platform independent.
std::string format_sat(Millisat msat);

/// Fixed-point decimal rendering of a double.
std::string format_fixed(double value, int decimals);

}  // namespace lnsim::csv
