#include "vsuspect/profile.hpp"

#include <cmath>
#include <fstream>

#include "vsuspect/errors.hpp"

namespace vsuspect {

using nlohmann::json;

namespace {

constexpr const char* kTraitNames[] = {"psychoticism", "extraversion", "neuroticism"};

std::optional<Vec3> parse_vec3(const json& doc, const char* key, bool non_negative, std::vector<Diagnostic>& diag) {
  const std::string path = std::string("/") + key;
  if (!doc.contains(key)) {
    diag.push_back({path, "missing required field"});
    return std::nullopt;
  }
  const auto& raw = doc[key];
  if (!raw.is_array() || raw.size() != 3) {
    diag.push_back({path, "expected an array of 3 numbers"});
    return std::nullopt;
  }
  Vec3 v{};
  for (std::size_t i = 0; i < 3; ++i) {
    if (!raw[i].is_number() || !std::isfinite(raw[i].get<double>())) {
      diag.push_back({path + "/" + std::to_string(i), "expected a finite number"});
      return std::nullopt;
    }
    v[i] = raw[i].get<double>();
    if (non_negative && v[i] < 0.0) {
      diag.push_back({path + "/" + std::to_string(i), "volatility must be non-negative"});
      return std::nullopt;
    }
  }
  return v;
}

}  // namespace

PersonalityProfile load_profile(const json& doc) {
  if (!doc.is_object()) throw ValidationError("", "profile document must be a JSON object");
  std::vector<Diagnostic> diag;
  PersonalityProfile profile;

  for (const auto& [key, _] : doc.items()) {
    if (key != "id" && key != "name" && key != "s0" && key != "sigma" && key != "sections" && key != "policy") {
      diag.push_back({"/" + key, "unknown field '" + key + "'"});
    }
  }
  if (!doc.contains("id") || !doc["id"].is_string() || doc["id"].get<std::string>().empty()) {
    diag.push_back({"/id", "expected a non-empty string"});
  } else {
    profile.id = doc["id"].get<std::string>();
  }
  if (doc.contains("name")) {
    if (doc["name"].is_string()) {
      profile.name = doc["name"].get<std::string>();
    } else {
      diag.push_back({"/name", "expected a string"});
    }
  }
  if (auto s0 = parse_vec3(doc, "s0", false, diag)) profile.s0 = *s0;
  if (auto sigma = parse_vec3(doc, "sigma", true, diag)) profile.sigma = *sigma;

  if (doc.contains("sections")) {
    const auto& raw = doc["sections"];
    if (!raw.is_object()) {
      diag.push_back({"/sections", "expected an object keyed by trait"});
    } else {
      for (const auto& [trait, _] : raw.items()) {
        if (trait != kTraitNames[0] && trait != kTraitNames[1] && trait != kTraitNames[2]) {
          diag.push_back({"/sections/" + trait, "unknown trait '" + trait + "'"});
        }
      }
      for (std::size_t t = 0; t < 3; ++t) {
        if (!raw.contains(kTraitNames[t])) continue;
        const auto& ts = raw[kTraitNames[t]];
        const std::string tpath = std::string("/sections/") + kTraitNames[t];
        if (!ts.is_object()) {
          diag.push_back({tpath, "expected {green, orange, red}"});
          continue;
        }
        auto& target = profile.sections.traits[t];
        for (const auto& [zone, notation] : ts.items()) {
          Section* slot = zone == "green" ? &target.green : zone == "orange" ? &target.orange
                                                          : zone == "red"    ? &target.red
                                                                             : nullptr;
          if (!slot) {
            diag.push_back({tpath + "/" + zone, "unknown section '" + zone + "'"});
            continue;
          }
          if (!notation.is_string()) {
            diag.push_back({tpath + "/" + zone, "expected interval notation such as \"[-5,-3)|(3,5]\""});
            continue;
          }
          try {
            *slot = Section::parse(notation.get<std::string>());
          } catch (const std::invalid_argument& e) {
            diag.push_back({tpath + "/" + zone, e.what()});
          }
        }
      }
      if (diag.empty()) {
        for (const auto& problem : profile.sections.partition_problems()) {
          diag.push_back({"/sections", "sections must partition the real line: " + problem});
        }
      }
    }
  }

  if (doc.contains("policy")) {
    try {
      profile.policy = load_policy(doc["policy"], "/policy");
    } catch (const ValidationError& e) {
      diag.insert(diag.end(), e.diagnostics().begin(), e.diagnostics().end());
    }
  }

  if (!diag.empty()) throw ValidationError(std::move(diag));
  return profile;
}

PersonalityProfile load_profile_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path, "cannot open profile document");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path, std::string("malformed JSON: ") + e.what());
  }
  return load_profile(doc);
}

json to_json(const PersonalityProfile& profile) {
  json sections = json::object();
  for (std::size_t t = 0; t < 3; ++t) {
    const auto& ts = profile.sections.traits[t];
    sections[kTraitNames[t]] = {
        {"green", ts.green.to_string()}, {"orange", ts.orange.to_string()}, {"red", ts.red.to_string()}};
  }
  return json{{"id", profile.id},       {"name", profile.name},         {"s0", profile.s0},
              {"sigma", profile.sigma}, {"sections", sections},         {"policy", to_json(profile.policy)}};
}

}  // namespace vsuspect
