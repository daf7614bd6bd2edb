#include "vsuspect/psych.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "vsuspect/errors.hpp"

namespace vsuspect {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_bound(std::string_view text) {
  text = trim(text);
  if (text == "inf" || text == "+inf" || text == "∞") return kInf;
  if (text == "-inf" || text == "-∞") return -kInf;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw std::invalid_argument("bad interval bound '" + std::string(text) + "'");
  }
  return value;
}

std::string format_bound(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

bool Interval::contains(double v) const noexcept {
  const bool above = lo_closed ? v >= lo : v > lo;
  const bool below = hi_closed ? v <= hi : v < hi;
  return above && below;
}

std::string Interval::to_string() const {
  return (lo_closed ? "[" : "(") + format_bound(lo) + "," + format_bound(hi) + (hi_closed ? "]" : ")");
}

bool Section::contains(double v) const noexcept {
  return std::any_of(parts.begin(), parts.end(), [v](const Interval& i) { return i.contains(v); });
}

Section Section::parse(std::string_view text) {
  Section section;
  text = trim(text);
  if (text.empty()) return section;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto bar = text.find('|', start);
    if (bar == std::string_view::npos) bar = text.size();
    const auto part = trim(text.substr(start, bar - start));
    if (part.size() < 5 || (part.front() != '[' && part.front() != '(') ||
        (part.back() != ']' && part.back() != ')')) {
      throw std::invalid_argument("bad interval '" + std::string(part) + "'");
    }
    const auto comma = part.find(',');
    if (comma == std::string_view::npos) throw std::invalid_argument("bad interval '" + std::string(part) + "'");
    Interval interval;
    interval.lo = parse_bound(part.substr(1, comma - 1));
    interval.hi = parse_bound(part.substr(comma + 1, part.size() - comma - 2));
    // An infinite end is never attained, whichever bracket was written.
    interval.lo_closed = part.front() == '[' && std::isfinite(interval.lo);
    interval.hi_closed = part.back() == ']' && std::isfinite(interval.hi);
    if (interval.lo > interval.hi) throw std::invalid_argument("empty interval '" + std::string(part) + "'");
    section.parts.push_back(interval);
    start = bar + 1;
  }
  return section;
}

std::string Section::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += "|";
    out += parts[i].to_string();
  }
  return out;
}

Zone TraitSections::classify(double v) const {
  if (green.contains(v)) return Zone::Green;
  if (orange.contains(v)) return Zone::Orange;
  if (red.contains(v)) return Zone::Red;
  throw EngineError("bad_sections", "value " + format_bound(v) + " lies in no section");
}

SectionBounds SectionBounds::defaults() {
  const TraitSections symmetric{Section::parse("[-3,3]"), Section::parse("[-5,-3)|(3,5]"),
                                Section::parse("(-inf,-5)|(5,inf)")};
  const TraitSections neuroticism{Section::parse("[-3,3]"), Section::parse("[-5,-3)|(3,inf)"),
                                  Section::parse("(-inf,-5)")};
  return SectionBounds{{symmetric, symmetric, neuroticism}};
}

std::vector<std::string> SectionBounds::partition_problems() const {
  static constexpr const char* kNames[] = {"psychoticism", "extraversion", "neuroticism"};
  std::vector<std::string> problems;
  for (std::size_t t = 0; t < 3; ++t) {
    const auto& ts = traits[t];
    // Every endpoint, a point just either side of it and a point between
    // neighbouring endpoints decides membership everywhere.
    std::set<double> points{-1e300, 1e300};
    for (const Section* s : {&ts.green, &ts.orange, &ts.red}) {
      for (const auto& p : s->parts) {
        for (double b : {p.lo, p.hi}) {
          if (!std::isfinite(b)) continue;
          points.insert(b);
          points.insert(std::nextafter(b, -kInf));
          points.insert(std::nextafter(b, kInf));
        }
      }
    }
    std::vector<double> probes(points.begin(), points.end());
    const std::size_t n = probes.size();
    for (std::size_t i = 0; i + 1 < n; ++i) probes.push_back(0.5 * (probes[i] + probes[i + 1]));
    for (double v : probes) {
      const int hits = ts.green.contains(v) + ts.orange.contains(v) + ts.red.contains(v);
      if (hits != 1) {
        problems.push_back(std::string(kNames[t]) + ": value " + format_bound(v) +
                           (hits == 0 ? " lies in no section" : " lies in more than one section"));
        break;
      }
    }
  }
  return problems;
}

InternalState update_state(const InternalState& prev, const Vec3& sigma, const EffectWeights& w_hot,
                           const EffectWeights& w_cold, int hot) {
  InternalState next = prev;
  for (std::size_t i = 0; i < 3; ++i) {
    const int effect = hot * w_hot[i] + (1 - hot) * w_cold[i];
    next.s[i] = prev.s[i] + sigma[i] * static_cast<double>(effect);
  }
  next.turn = prev.turn + 1;
  return next;
}

MentalIntegrity mental_integrity(const Vec3& s, const SectionBounds& bounds) {
  MentalIntegrity mi;
  for (std::size_t i = 0; i < 3; ++i) ++mi.counts[static_cast<std::size_t>(bounds.traits[i].classify(s[i]))];
  return mi;
}

}  // namespace vsuspect
