#pragma once

#include <cstddef>
#include <fstream>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sentinel::csv {

using Row = std::vector<std::string>;

// RFC 4180 reader: comma separated, double-quoted fields with "" escapes,
// quoted fields may span lines. A UTF-8 BOM on the first line is skipped.
class Reader {
 public:
  explicit Reader(const std::string& path);
  explicit Reader(std::istream& in);

  // Header row. Throws DataError if the file is empty.
  const Row& header() const { return header_; }

  // Next record; false at end of input. `line` is the 1-based physical line
  // where the record starts.
  bool next(Row& row);
  std::size_t line() const { return record_line_; }

  // Column index by name, or nullopt.
  std::optional<std::size_t> column(std::string_view name) const;

 private:
  bool read_record(Row& row);

  std::ifstream file_;
  std::istream* in_;
  Row header_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t physical_line_ = 0;
  std::size_t record_line_ = 0;
};

// Parses one complete record from a string (no embedded newlines required).
Row parse_line(std::string_view line);

// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

class Writer {
 public:
  explicit Writer(const std::string& path);
  explicit Writer(std::ostream& out) : out_(&out) {}

  void row(const std::vector<std::string>& fields);
  void flush();

 private:
  std::ofstream file_;
  std::ostream* out_;
};

// Shortest representation that round-trips a double exactly.
std::string format_double(double v);

}  // namespace sentinel::csv
