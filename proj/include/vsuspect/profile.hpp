#pragma once

#include <string>

#include "json.hpp"
#include "vsuspect/policy.hpp"
#include "vsuspect/psych.hpp"

namespace vsuspect {

/// Initial state, volatility, section bounds and response policy of one
/// virtual suspect.
struct PersonalityProfile {
  std::string id;
  std::string name;
  Vec3 s0{};
  Vec3 sigma{};
  SectionBounds sections = SectionBounds::defaults();
  PolicyTable policy = PolicyTable::defaults();

  friend bool operator==(const PersonalityProfile&, const PersonalityProfile&) = default;
};

/// `sections` and `policy` are optional and default to the calibrated values.
PersonalityProfile load_profile(const nlohmann::json& document);
PersonalityProfile load_profile_file(const std::string& path);
nlohmann::json to_json(const PersonalityProfile& profile);

}  // namespace vsuspect
