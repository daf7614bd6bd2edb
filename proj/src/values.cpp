#include "vsuspect/values.hpp"

#include <cctype>
#include <charconv>
#include <chrono>
#include <cstdio>

namespace vsuspect {

namespace {

std::optional<int> parse_int(std::string_view text) {
  if (text.empty()) return std::nullopt;
  for (char c : text) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
  }
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::optional<std::string> format_date(int y, int m, int d) {
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (y < 1 || y > 9999 || !ymd.ok()) return std::nullopt;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
  return std::string(buf);
}

}  // namespace

std::optional<std::string> canonical_date(std::string_view text) {
  if (text.size() == 10 && text[4] == '-' && text[7] == '-') {
    auto y = parse_int(text.substr(0, 4));
    auto m = parse_int(text.substr(5, 2));
    auto d = parse_int(text.substr(8, 2));
    if (y && m && d) return format_date(*y, *m, *d);
    return std::nullopt;
  }
  if (text.size() == 10 && text[2] == '/' && text[5] == '/') {
    auto d = parse_int(text.substr(0, 2));
    auto m = parse_int(text.substr(3, 2));
    auto y = parse_int(text.substr(6, 4));
    if (y && m && d) return format_date(*y, *m, *d);
  }
  return std::nullopt;
}

std::optional<std::string> canonical_time(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos || colon == 0 || colon > 2) return std::nullopt;
  if (text.size() - colon - 1 != 2) return std::nullopt;
  auto h = parse_int(text.substr(0, colon));
  auto m = parse_int(text.substr(colon + 1));
  if (!h || !m || *h > 23 || *m > 59) return std::nullopt;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02d:%02d", *h, *m);
  return std::string(buf);
}

std::string fold_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace vsuspect
