#include "gramshield/trajectory.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace gramshield {

using json = nlohmann::ordered_json;

const char* infeasible_reason_name(InfeasibleReason r) {
  switch (r) {
    case InfeasibleReason::NonMonotone: return "non-monotone";
    case InfeasibleReason::Closed: return "closed";
    case InfeasibleReason::Unreachable: return "unreachable";
  }
  return "?";
}

std::optional<InfeasibleReason> validate_trajectory(
    const Trajectory& traj, const PoiCatalog& catalog, const TimeAxis& axis,
    const SpeedProfile& speed) {
  const auto& pts = traj.points;
  for (size_t i = 1; i < pts.size(); ++i)
    if (pts[i].t <= pts[i - 1].t) return InfeasibleReason::NonMonotone;
  for (const TrajPoint& p : pts)
    if (!catalog.open_at(p.poi, p.t, axis)) return InfeasibleReason::Closed;
  for (size_t i = 1; i < pts.size(); ++i) {
    const double gap_min =
        static_cast<double>(pts[i].t - pts[i - 1].t) * axis.step_minutes;
    const double kmh = speed.at_minute(axis.minute_of(pts[i - 1].t));
    if (!catalog.reachable(pts[i - 1].poi, pts[i].poi, kmh, gap_min))
      return InfeasibleReason::Unreachable;
  }
  return std::nullopt;
}

int FilterOutcome::drop_count(InfeasibleReason r) const {
  int n = 0;
  for (const auto& [_, reason] : dropped)
    if (reason == r) ++n;
  return n;
}

FilterOutcome filter_trajectories(const TrajectorySet& set,
                                  const PoiCatalog& catalog,
                                  const TimeAxis& axis,
                                  const SpeedProfile& speed) {
  FilterOutcome out;
  for (const Trajectory& traj : set) {
    if (auto reason = validate_trajectory(traj, catalog, axis, speed))
      out.dropped.emplace_back(traj.user, *reason);
    else
      out.kept.push_back(traj);
  }
  return out;
}

RegionTrajectory project_trajectory(const Trajectory& traj,
                                    const RegionSet& regions,
                                    const PoiCatalog& catalog,
                                    const TimeAxis& axis) {
  RegionTrajectory out;
  out.reserve(traj.points.size());
  for (const TrajPoint& p : traj.points) {
    if (!catalog.open_at(p.poi, p.t, axis))
      throw UnmappablePoint("trajectory '" + traj.user + "': POI '" +
                            catalog.poi(p.poi).name +
                            "' visited while closed (t=" + std::to_string(p.t) +
                            "); filter the set first");
    const int cell = catalog.grid_cell_of(p.poi, regions.grid_side);
    const int slot = axis.minute_of(p.t) / regions.slot_minutes;
    const int region =
        regions.region_for(cell, slot, catalog.poi(p.poi).leaf_category());
    if (region < 0)
      throw UnmappablePoint("trajectory '" + traj.user +
                            "': no region for point (this region set was "
                            "built from a different catalog?)");
    out.push_back(region);
  }
  return out;
}

TrajectorySet read_trajectories_jsonl(const std::string& path,
                                      const PoiCatalog& catalog) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open trajectory file: " + path);
  TrajectorySet set;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw LoadError("line " + std::to_string(lineno) + ": bad JSON: " +
                      e.what());
    }
    Trajectory traj;
    traj.user = j.value("user", "u" + std::to_string(lineno));
    if (!j.contains("points") || !j["points"].is_array())
      throw LoadError("line " + std::to_string(lineno) +
                      ": missing points array");
    for (const auto& jp : j["points"]) {
      const std::string poi_name = jp.at("poi").get<std::string>();
      const int poi = catalog.find(poi_name);
      if (poi < 0)
        throw LoadError("line " + std::to_string(lineno) + ": unknown POI '" +
                        poi_name + "'");
      traj.points.push_back(TrajPoint{poi, jp.at("t").get<int>()});
    }
    set.push_back(std::move(traj));
  }
  return set;
}

void write_trajectories_jsonl(const std::string& path,
                              const TrajectorySet& set,
                              const PoiCatalog& catalog) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write trajectory file: " + path);
  for (const Trajectory& traj : set) {
    json j;
    j["user"] = traj.user;
    json pts = json::array();
    for (const TrajPoint& p : traj.points)
      pts.push_back({{"poi", catalog.poi(p.poi).name}, {"t", p.t}});
    j["points"] = std::move(pts);
    out << j.dump() << '\n';
  }
}

}  // namespace gramshield
