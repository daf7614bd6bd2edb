#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "vsuspect/templates.hpp"

namespace vsuspect {

/// PEN trait order used by every 3-vector in the engine.
enum class Trait { Psychoticism = 0, Extraversion = 1, Neuroticism = 2 };

using Vec3 = std::array<double, 3>;

struct InternalState {
  Vec3 s{};
  std::uint64_t turn = 0;

  friend bool operator==(const InternalState&, const InternalState&) = default;
};

/// One interval of the real line; infinite endpoints are always open.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_closed = false;
  bool hi_closed = false;

  bool contains(double v) const noexcept;
  std::string to_string() const;

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Union of intervals.
struct Section {
  std::vector<Interval> parts;

  bool contains(double v) const noexcept;
  /// Notation like "[-5,-3)|(3,5]"; "inf"/"-inf" for unbounded ends.
  static Section parse(std::string_view text);
  std::string to_string() const;

  friend bool operator==(const Section&, const Section&) = default;
};

enum class Zone { Green = 0, Orange = 1, Red = 2 };

struct TraitSections {
  Section green;
  Section orange;
  Section red;

  /// First section containing v; the sections of a validated profile
  /// partition the real line, so exactly one matches.
  Zone classify(double v) const;

  friend bool operator==(const TraitSections&, const TraitSections&) = default;
};

/// Green/orange/red sections per trait.
struct SectionBounds {
  std::array<TraitSections, 3> traits;

  /// Calibrated defaults: P and E green [-3,3], orange [-5,-3)|(3,5],
  /// red (-inf,-5)|(5,inf); N green [-3,3], orange [-5,-3)|(3,inf),
  /// red (-inf,-5).
  static SectionBounds defaults();

  /// Empty if the sections of every trait partition the real line,
  /// otherwise one message per problem found.
  std::vector<std::string> partition_problems() const;

  friend bool operator==(const SectionBounds&, const SectionBounds&) = default;
};

/// Counts of state components in the green, orange and red sections.
struct MentalIntegrity {
  std::array<int, 3> counts{};

  int green() const noexcept { return counts[0]; }
  int orange() const noexcept { return counts[1]; }
  int red() const noexcept { return counts[2]; }

  friend bool operator==(const MentalIntegrity&, const MentalIntegrity&) = default;
  friend auto operator<=>(const MentalIntegrity&, const MentalIntegrity&) = default;
};

/// s_t = s_{t-1} + sigma * (hot * w_hot + (1 - hot) * w_cold), component-wise.
/// No clamping.
InternalState update_state(const InternalState& prev, const Vec3& sigma, const EffectWeights& w_hot,
                           const EffectWeights& w_cold, int hot);

MentalIntegrity mental_integrity(const Vec3& s, const SectionBounds& bounds);

}  // namespace vsuspect
