#ifndef GRAMSHIELD_CONFIG_HPP
#define GRAMSHIELD_CONFIG_HPP

#include <cmath>
#include <cstdint>
#include <string>

#include "gramshield/datagen.hpp"
#include "gramshield/distance.hpp"

namespace gramshield {

// Run parameters; defaults follow the evaluation protocol (10-minute
// timesteps, bigrams, eps = 5, 4x4 grid, hourly slots, kappa = 10,
// spatial merging first, walking speed).
struct RunConfig {
  int g_t = 10;
  int g_s = 4;
  int slot_minutes = 60;
  int kappa = 10;
  std::string merge_order = "space,time,category";
  int n = 2;
  double epsilon = 5.0;
  double speed_kmh = 4.0;
  std::optional<std::array<double, 24>> speed_by_hour;
  long long gamma = 50'000;
  double time_cap_hours = 12.0;
  double unrelated_cost = 10.0;
  double weight_space = 1.0;
  double weight_time = 1.0;
  double weight_category = 1.0;
  std::size_t ngram_cap = 4'000'000;
  double mbr_slack_km = NAN;  // NAN = derive from each record's envelope
  std::uint64_t seed = 1234;
  DatagenConfig datagen;

  TimeAxis axis() const { return TimeAxis{g_t}; }
  DistanceParams distance_params() const;
  SpeedProfile speed() const;
};

// Flat key = value text; '#' comments. Unknown keys are rejected so typos
// fail loudly. Events: event.N = poi|cat,<entity>,<start_min>,<end_min>,<size>
RunConfig load_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);

// Seed precedence: explicit --seed beats GRAMSHIELD_SEED beats the config
// file value.
std::uint64_t resolve_seed(const RunConfig& config, bool cli_seed_set,
                           std::uint64_t cli_seed);

}  // namespace gramshield

#endif
