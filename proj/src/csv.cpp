#include "sentinel/csv.hpp"

#include <charconv>
#include <istream>
#include <sstream>
#include <ostream>
#include <system_error>

#include "sentinel/error.hpp"

namespace sentinel::csv {

Reader::Reader(const std::string& path) : file_(path, std::ios::binary), in_(&file_) {
  if (!file_) throw DataError("cannot open file: " + path);
  if (!read_record(header_)) throw DataError("missing header row: " + path);
  if (!header_.empty() && header_[0].starts_with("\xEF\xBB\xBF")) header_[0].erase(0, 3);
  for (std::size_t i = 0; i < header_.size(); ++i) index_.emplace(header_[i], i);
}

Reader::Reader(std::istream& in) : in_(&in) {
  if (!read_record(header_)) throw DataError("missing header row");
  if (!header_.empty() && header_[0].starts_with("\xEF\xBB\xBF")) header_[0].erase(0, 3);
  for (std::size_t i = 0; i < header_.size(); ++i) index_.emplace(header_[i], i);
}

std::optional<std::size_t> Reader::column(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool Reader::next(Row& row) {
  while (read_record(row)) {
    // Skip blank lines.
    if (row.size() == 1 && row[0].empty()) continue;
    return true;
  }
  return false;
}

bool Reader::read_record(Row& row) {
  row.clear();
  std::string line;
  if (!std::getline(*in_, line)) return false;
  ++physical_line_;
  record_line_ = physical_line_;

  std::string field;
  bool quoted = false;
  bool field_started = false;
  for (;;) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      char c = line[i];
      if (quoted) {
        if (c == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            field.push_back('"');
            ++i;
          } else {
            quoted = false;
          }
        } else {
          field.push_back(c);
        }
      } else if (c == '"' && !field_started) {
        quoted = true;
        field_started = true;
      } else if (c == ',') {
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
      } else if (c == '\r' && i + 1 == line.size()) {
        // CRLF line ending
      } else {
        field.push_back(c);
        field_started = true;
      }
    }
    if (!quoted) break;
    // Quoted field continues on the next physical line.
    field.push_back('\n');
    if (!std::getline(*in_, line)) throw DataError("unterminated quoted field at line " + std::to_string(record_line_));
    ++physical_line_;
  }
  row.push_back(std::move(field));
  return true;
}

Row parse_line(std::string_view line) {
  std::string s(line);
  std::istringstream in(s);
  Reader r(in);
  return r.header();
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

Writer::Writer(const std::string& path) : file_(path, std::ios::binary | std::ios::trunc), out_(&file_) {
  if (!file_) throw DataError("cannot write file: " + path);
}

void Writer::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_->put(',');
    *out_ << escape(fields[i]);
  }
  out_->put('\n');
}

void Writer::flush() { out_->flush(); }

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace sentinel::csv
