#include "gramshield/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "gramshield/csv.hpp"

namespace gramshield {

SpeedProfile RunConfig::speed() const {
  SpeedProfile s(speed_kmh);
  s.by_hour = speed_by_hour;
  return s;
}

DistanceParams RunConfig::distance_params() const {
  DistanceParams p;
  p.time_cap_hours = time_cap_hours;
  p.unrelated_cost = unrelated_cost;
  p.weight_space = weight_space;
  p.weight_time = weight_time;
  p.weight_category = weight_category;
  return p;
}

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

CampusEvent parse_event(const std::string& value) {
  const std::vector<std::string> f = split_csv_line(value);
  if (f.size() != 5)
    throw ParseError("event needs kind,entity,start_min,end_min,size: " +
                     value);
  CampusEvent ev;
  if (f[0] == "poi")
    ev.is_category = false;
  else if (f[0] == "cat")
    ev.is_category = true;
  else
    throw ParseError("event kind must be poi or cat: " + value);
  ev.entity = f[1];
  ev.start_min = std::stoi(f[2]);
  ev.end_min = std::stoi(f[3]);
  ev.size = std::stoi(f[4]);
  if (ev.size < 0) throw ParseError("negative event size: " + value);
  return ev;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ParseError("config line " + std::to_string(lineno) +
                       ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    try {
      if (key == "g_t") cfg.g_t = std::stoi(value);
      else if (key == "g_s") cfg.g_s = std::stoi(value);
      else if (key == "slot_minutes") cfg.slot_minutes = std::stoi(value);
      else if (key == "kappa") cfg.kappa = std::stoi(value);
      else if (key == "merge_order") cfg.merge_order = value;
      else if (key == "n") cfg.n = std::stoi(value);
      else if (key == "epsilon") cfg.epsilon = std::stod(value);
      else if (key == "speed_kmh") cfg.speed_kmh = std::stod(value);
      else if (key == "speed_by_hour") {
        const auto parts = split_csv_line(value);
        if (parts.size() != 24)
          throw ParseError("speed_by_hour needs 24 comma-separated values");
        std::array<double, 24> table{};
        for (int h = 0; h < 24; ++h) {
          table[h] = std::stod(parts[h]);
          if (table[h] <= 0)
            throw ParseError("speed_by_hour entries must be positive");
        }
        cfg.speed_by_hour = table;
      }
      else if (key == "gamma") cfg.gamma = std::stoll(value);
      else if (key == "time_cap_hours") cfg.time_cap_hours = std::stod(value);
      else if (key == "unrelated_cost") cfg.unrelated_cost = std::stod(value);
      else if (key == "weight_space") cfg.weight_space = std::stod(value);
      else if (key == "weight_time") cfg.weight_time = std::stod(value);
      else if (key == "weight_category")
        cfg.weight_category = std::stod(value);
      else if (key == "ngram_cap")
        cfg.ngram_cap = static_cast<std::size_t>(std::stoll(value));
      else if (key == "mbr_slack_km")
        cfg.mbr_slack_km = value == "auto" ? NAN : std::stod(value);
      else if (key == "seed")
        cfg.seed = static_cast<std::uint64_t>(std::stoull(value));
      else if (key == "count") cfg.datagen.count = std::stoi(value);
      else if (key == "traj_len_min") cfg.datagen.len_min = std::stoi(value);
      else if (key == "traj_len_max") cfg.datagen.len_max = std::stoi(value);
      else if (key == "start_min") cfg.datagen.start_min = std::stoi(value);
      else if (key == "start_max") cfg.datagen.start_max = std::stoi(value);
      else if (key == "max_gap_min")
        cfg.datagen.max_gap_min = std::stoi(value);
      else if (key.rfind("event.", 0) == 0)
        cfg.datagen.events.push_back(parse_event(value));
      else
        throw ParseError("unknown config key '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw ParseError("config line " + std::to_string(lineno) +
                       ": bad value for '" + key + "'");
    }
  }
  if (cfg.g_t <= 0 || 1440 % cfg.g_t != 0)
    throw ParseError("g_t must divide 1440");
  if (cfg.slot_minutes % cfg.g_t != 0)
    throw ParseError("slot_minutes must be a multiple of g_t");
  if (cfg.epsilon <= 0) throw ParseError("epsilon must be positive");
  if (cfg.n < 1) throw ParseError("n must be >= 1");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  if (path.empty()) return RunConfig{};
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::uint64_t resolve_seed(const RunConfig& config, bool cli_seed_set,
                           std::uint64_t cli_seed) {
  if (cli_seed_set) return cli_seed;
  if (const char* env = std::getenv("GRAMSHIELD_SEED"))
    return static_cast<std::uint64_t>(std::strtoull(env, nullptr, 10));
  return config.seed;
}

}  // namespace gramshield
