#pragma once

// Stage orchestration. Each stage writes its artifacts under
// <output>/<stage>/ and a JSON summary; both are mirrored into a cache
// directory keyed by the hash of the config sections the stage reads, so a
// repeated run restores them instead of recomputing. Heavy intermediate
// objects (eigenbasis and branches, channel profiles) have binary caches of
// their own.
//
// Cache directory: RunOptions::cache_dir, else $NLSSEL_CACHE_DIR, else
// <output>/.cache.

#include <string>
#include <vector>

#include "nls/config.hpp"

namespace nls {

inline constexpr const char* kToolVersion = "1.0.0";

struct StageRecord {
  std::string name;
  std::string key;
  json summary;
  std::vector<std::string> artifacts;  // relative to the run directory
  bool cache_hit = false;
  double seconds = 0;
};

struct RunManifest {
  std::string config_hash;
  std::string version = kToolVersion;
  std::string created;  // UTC timestamp
  std::string status = "ok";
  std::string failed_stage, error_kind, error;
  std::vector<StageRecord> stages;
  json config;

  // Timestamps, wall-clock and cache flags sit under "run" keys so that the
  // rest is identical across repeated runs.
  json to_json() const;
  static RunManifest from_json(const json& j);
  const StageRecord* stage(const std::string& name) const;
};

struct RunOptions {
  std::string cache_dir;
  bool use_cache = true;
};

std::string resolve_cache_dir(const ScenarioConfig& cfg, const RunOptions& opt);

// Runs cfg.stages in canonical order and writes <output>/manifest.json. A
// failing stage still leaves a partial manifest; the error is rethrown with
// the stage name prefixed.
RunManifest run_scenario(const ScenarioConfig& cfg, const RunOptions& opt = {});

}  // namespace nls
