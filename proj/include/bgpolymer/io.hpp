#pragma once

// JSON views of the value types, artifact headers and atomic file output.
// Needs nlohmann/json (vendored as json.hpp).

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "bgpolymer/distributions.hpp"
#include "bgpolymer/errors.hpp"
#include "bgpolymer/lattice.hpp"
#include "bgpolymer/models.hpp"
#include "bgpolymer/stats.hpp"
#include "bgpolymer/verify.hpp"
#include "bgpolymer/version.hpp"

namespace bgpolymer {

using json = nlohmann::json;

inline json to_json(const DistributionSpec& d) {
  return {{"family", family_name(d.family())}, {"shape1", d.shape1()}, {"shape2", d.shape2()}};
}

inline DistributionSpec distribution_from_json(const json& j) {
  try {
    return {parse_family(j.at("family").get<std::string>()), j.at("shape1").get<double>(),
            j.at("shape2").get<double>()};
  } catch (const json::exception& e) {
    throw ParameterError(std::string("bad distribution JSON: ") + e.what());
  }
}

inline json to_json(const AffineLaw& law) {
  return {{"law", to_json(law.base())}, {"scale", law.scale()}, {"shift", law.shift()},
          {"text", law.to_string()}};
}

inline json to_json(const ModelSpec& m) {
  return {{"a", m.a},         {"b", m.b},       {"mu", m.mu}, {"lambda", m.lambda},
          {"beta", m.beta},   {"reflected", m.reflected},
          {"case", case_tag(m.model_case())}};
}

/*
 * Accepts {"model": "<preset name>"} and/or explicit fields a, b, mu, lambda,
 * beta, reflected. Explicit fields override the preset. Does not validate.
 */
inline ModelSpec model_from_json(const json& j) {
  ModelSpec m;
  try {
    if (j.contains("model")) {
      const auto name = j.at("model").get<std::string>();
      const auto basic = parse_basic_model(name);
      if (!basic) throw ParameterError("unknown model preset '" + name + "'");
      m = preset(*basic);
    }
    auto take = [&](const char* key, double& slot) {
      if (j.contains(key)) slot = j.at(key).get<double>();
    };
    take("a", m.a);
    take("b", m.b);
    take("mu", m.mu);
    take("lambda", m.lambda);
    take("beta", m.beta);
    if (j.contains("reflected")) m.reflected = j.at("reflected").get<bool>();
  } catch (const json::exception& e) {
    throw ParameterError(std::string("bad model JSON: ") + e.what());
  }
  return m;
}

inline json to_json(const StationaryTriple& t) {
  return {{"R1", to_json(t.r1)}, {"R2", to_json(t.r2)}, {"Y", to_json(t.y)}};
}

inline json to_json(const TestReport& r) {
  return {{"name", r.name}, {"statistic", r.statistic}, {"threshold", r.threshold},
          {"p_value", r.p_value}, {"n1", r.n1}, {"n2", r.n2}, {"seed", r.seed},
          {"pass", r.pass}, {"detail", r.detail}};
}

inline json to_json(const LatticeField& f) {
  json r1 = json::array();
  for (std::size_t i = 1; i <= f.m; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j <= f.n; ++j) row.push_back(f.logR1(i, j));
    r1.push_back(std::move(row));
  }
  json r2 = json::array();
  for (std::size_t i = 0; i <= f.m; ++i) {
    json row = json::array();
    for (std::size_t j = 1; j <= f.n; ++j) row.push_back(f.logR2(i, j));
    r2.push_back(std::move(row));
  }
  json out = {{"m", f.m}, {"n", f.n}, {"seed", f.seed}, {"logR1", std::move(r1)},
              {"logR2", std::move(r2)}};
  if (f.model) out["model"] = to_json(*f.model);
  return out;
}

/// 64-bit FNV-1a of the compact dump, as 16 hex digits. Stable across platforms and runs.
inline std::string config_hash(const json& config) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : config.dump()) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

/// {command, version, seed, config_hash}: embedded in every emitted artifact.
inline json artifact_header(std::string_view command, std::uint64_t seed, const json& config) {
  return {{"command", command}, {"version", kVersion}, {"seed", seed},
          {"config_hash", config_hash(config)}};
}

/// Writes to a sibling temporary file and renames it over `path`.
inline void atomic_write(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace bgpolymer
