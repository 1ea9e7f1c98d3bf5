#include "sentinel/timeutil.hpp"

#include <array>
#include <cctype>
#include <cstdio>

namespace sentinel {
namespace {

using namespace std::chrono;

// Reads exactly `width` digits starting at `pos`.
bool read_int(std::string_view s, std::size_t& pos, int width, int& out) {
  if (pos + width > s.size()) return false;
  int v = 0;
  for (int i = 0; i < width; ++i) {
    char c = s[pos + i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  pos += width;
  out = v;
  return true;
}

std::optional<Timestamp> make(int y, int mo, int d, int h, int mi, int sec, int offset_minutes) {
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || sec > 60) return std::nullopt;
  Timestamp t = sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec};
  return t - minutes{offset_minutes};
}

bool parse_offset(std::string_view s, std::size_t& pos, int& offset) {
  offset = 0;
  if (pos == s.size()) return true;
  if (s[pos] == 'Z' || s[pos] == 'z') {
    ++pos;
    return true;
  }
  if (s[pos] != '+' && s[pos] != '-') return false;
  int sign = s[pos] == '-' ? -1 : 1;
  ++pos;
  int hh = 0, mm = 0;
  if (!read_int(s, pos, 2, hh)) return false;
  if (pos < s.size() && s[pos] == ':') ++pos;
  if (pos < s.size() && !read_int(s, pos, 2, mm)) return false;
  offset = sign * (hh * 60 + mm);
  return true;
}

std::optional<Timestamp> parse_iso(std::string_view s) {
  std::size_t pos = 0;
  int y, mo, d, h = 0, mi = 0, sec = 0;
  if (!read_int(s, pos, 4, y) || pos >= s.size() || s[pos++] != '-') return std::nullopt;
  if (!read_int(s, pos, 2, mo) || pos >= s.size() || s[pos++] != '-') return std::nullopt;
  if (!read_int(s, pos, 2, d)) return std::nullopt;
  int offset = 0;
  if (pos < s.size()) {
    if (s[pos] != 'T' && s[pos] != ' ') return std::nullopt;
    ++pos;
    if (!read_int(s, pos, 2, h) || pos >= s.size() || s[pos++] != ':') return std::nullopt;
    if (!read_int(s, pos, 2, mi)) return std::nullopt;
    if (pos < s.size() && s[pos] == ':') {
      ++pos;
      if (!read_int(s, pos, 2, sec)) return std::nullopt;
      if (pos < s.size() && s[pos] == '.') {
        ++pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
      }
    }
    if (pos < s.size() && s[pos] == ' ') ++pos;
    if (!parse_offset(s, pos, offset)) return std::nullopt;
  }
  if (pos != s.size()) return std::nullopt;
  return make(y, mo, d, h, mi, sec, offset);
}

// `Wed Oct 10 20:19:24 +0000 2018`
std::optional<Timestamp> parse_legacy(std::string_view s) {
  static constexpr std::array<std::string_view, 12> kMonths = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                               "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  if (s.size() != 30) return std::nullopt;
  std::string_view mon = s.substr(4, 3);
  int mo = 0;
  for (std::size_t i = 0; i < kMonths.size(); ++i)
    if (kMonths[i] == mon) mo = static_cast<int>(i) + 1;
  if (mo == 0) return std::nullopt;
  std::size_t pos = 8;
  int d, h, mi, sec, y, offset;
  if (!read_int(s, pos, 2, d) || s[pos++] != ' ') return std::nullopt;
  if (!read_int(s, pos, 2, h) || s[pos++] != ':') return std::nullopt;
  if (!read_int(s, pos, 2, mi) || s[pos++] != ':') return std::nullopt;
  if (!read_int(s, pos, 2, sec) || s[pos++] != ' ') return std::nullopt;
  std::string_view off = s.substr(pos, 5);
  std::size_t opos = 0;
  if (!parse_offset(off, opos, offset) || opos != 5) return std::nullopt;
  pos += 5;
  if (s[pos++] != ' ' || !read_int(s, pos, 4, y)) return std::nullopt;
  return make(y, mo, d, h, mi, sec, offset);
}

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) return std::nullopt;
  if (std::isdigit(static_cast<unsigned char>(text[0]))) return parse_iso(text);
  return parse_legacy(text);
}

std::string format_timestamp(Timestamp t) {
  auto day_point = floor<days>(t);
  year_month_day ymd{day_point};
  hh_mm_ss hms{t - day_point};
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

}  // namespace sentinel
