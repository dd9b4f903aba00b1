#include "gramshield/index_io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

namespace gramshield {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

BuildIndex build_index(PoiCatalog catalog, const RunConfig& config) {
  BuildIndex index;
  index.params = config;
  index.catalog = std::move(catalog);
  RegionSet base =
      build_regions(index.catalog, config.g_s, config.slot_minutes);
  index.regions = merge_regions(base, index.catalog, config.kappa,
                                parse_merge_order(config.merge_order));
  // gram sets use the fastest hourly speed so they stay supersets of
  // anything the per-trajectory checks accept
  index.grams = build_ngram_family(index.catalog, index.regions, config.n,
                                   config.speed().max_kmh(), config.g_t,
                                   config.ngram_cap);
  return index;
}

void save_index(const BuildIndex& index, const std::string& dir) {
  fs::create_directories(dir);
  json j;
  j["format"] = "gramshield-index";
  j["version"] = 1;

  json params;
  params["g_t"] = index.params.g_t;
  params["g_s"] = index.params.g_s;
  params["slot_minutes"] = index.params.slot_minutes;
  params["kappa"] = index.params.kappa;
  params["merge_order"] = index.params.merge_order;
  params["n"] = index.params.n;
  params["speed_kmh"] = index.params.speed_kmh;
  if (index.params.speed_by_hour)
    params["speed_by_hour"] = *index.params.speed_by_hour;
  params["gamma"] = index.params.gamma;
  if (!std::isnan(index.params.mbr_slack_km))
    params["mbr_slack_km"] = index.params.mbr_slack_km;
  params["ngram_cap"] = index.params.ngram_cap;
  params["time_cap_hours"] = index.params.time_cap_hours;
  params["unrelated_cost"] = index.params.unrelated_cost;
  j["params"] = std::move(params);

  const CategoryHierarchy& h = index.catalog.hierarchy();
  json nodes = json::array();
  for (int i = 0; i < h.size(); ++i) {
    const CategoryNode& n = h.node(i);
    json jn;
    jn["name"] = n.name;
    jn["level"] = n.level;
    jn["parent"] = n.parent;
    if (n.default_hours) {
      jn["open"] = n.default_hours->open;
      jn["close"] = n.default_hours->close;
    }
    nodes.push_back(std::move(jn));
  }
  j["hierarchy"] = std::move(nodes);

  json pois = json::array();
  for (int i = 0; i < index.catalog.size(); ++i) {
    const Poi& p = index.catalog.poi(i);
    json jp;
    jp["name"] = p.name;
    jp["lat"] = p.lat;
    jp["lon"] = p.lon;
    jp["path"] = p.category_path;
    jp["open"] = p.hours.open;
    jp["close"] = p.hours.close;
    jp["pop"] = p.popularity;
    pois.push_back(std::move(jp));
  }
  j["pois"] = std::move(pois);

  json regions = json::array();
  for (const StcRegion& r : index.regions.regions) {
    json jr;
    jr["cells"] = r.space_cells;
    jr["slots"] = r.time_slots;
    jr["cats"] = r.category_nodes;
    jr["members"] = r.members;
    regions.push_back(std::move(jr));
  }
  j["regions"] = std::move(regions);

  std::vector<std::pair<std::uint64_t, int>> proj(
      index.regions.projection().begin(), index.regions.projection().end());
  std::sort(proj.begin(), proj.end());
  json jproj = json::array();
  for (const auto& [key, id] : proj) jproj.push_back({key, id});
  j["projection"] = std::move(jproj);

  json grams = json::array();
  for (const NGramSet& set : index.grams.sets) grams.push_back(set.flat());
  j["grams"] = std::move(grams);

  std::ofstream out(fs::path(dir) / "index.json", std::ios::binary);
  if (!out) throw LoadError("cannot write index to " + dir);
  out << j.dump() << '\n';
}

BuildIndex load_index(const std::string& dir) {
  const fs::path path = fs::path(dir) / "index.json";
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open index: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw LoadError("bad index file: " + std::string(e.what()));
  }
  if (j.value("format", "") != "gramshield-index" || j.value("version", 0) != 1)
    throw LoadError("unrecognized index format in " + path.string());

  BuildIndex index;
  RunConfig& cfg = index.params;
  const json& params = j.at("params");
  cfg.g_t = params.at("g_t").get<int>();
  cfg.g_s = params.at("g_s").get<int>();
  cfg.slot_minutes = params.at("slot_minutes").get<int>();
  cfg.kappa = params.at("kappa").get<int>();
  cfg.merge_order = params.at("merge_order").get<std::string>();
  cfg.n = params.at("n").get<int>();
  cfg.speed_kmh = params.at("speed_kmh").get<double>();
  if (params.contains("speed_by_hour"))
    cfg.speed_by_hour = params.at("speed_by_hour").get<std::array<double, 24>>();
  cfg.gamma = params.value("gamma", cfg.gamma);
  cfg.mbr_slack_km = params.value("mbr_slack_km", NAN);
  cfg.ngram_cap = params.at("ngram_cap").get<std::size_t>();
  cfg.time_cap_hours = params.at("time_cap_hours").get<double>();
  cfg.unrelated_cost = params.at("unrelated_cost").get<double>();

  CategoryHierarchy h;
  for (const json& jn : j.at("hierarchy")) {
    std::optional<OpenHours> hours;
    if (jn.contains("open"))
      hours = OpenHours{jn.at("open").get<int>(), jn.at("close").get<int>()};
    h.add_node(jn.at("name").get<std::string>(), jn.at("level").get<int>(),
               jn.at("parent").get<int>(), hours);
  }
  std::vector<Poi> pois;
  for (const json& jp : j.at("pois")) {
    Poi p;
    p.name = jp.at("name").get<std::string>();
    p.lat = jp.at("lat").get<double>();
    p.lon = jp.at("lon").get<double>();
    p.category_path = jp.at("path").get<std::vector<int>>();
    p.hours = OpenHours{jp.at("open").get<int>(), jp.at("close").get<int>()};
    p.popularity = jp.at("pop").get<double>();
    pois.push_back(std::move(p));
  }
  index.catalog = PoiCatalog::from_parts(std::move(h), std::move(pois));

  index.regions.grid_side = cfg.g_s;
  index.regions.slot_minutes = cfg.slot_minutes;
  int id = 0;
  for (const json& jr : j.at("regions")) {
    StcRegion r;
    r.id = id++;
    r.space_cells = jr.at("cells").get<std::vector<int>>();
    r.time_slots = jr.at("slots").get<std::vector<int>>();
    r.category_nodes = jr.at("cats").get<std::vector<int>>();
    r.members = jr.at("members").get<std::vector<int>>();
    double lat = 0, lon = 0;
    for (int m : r.members) {
      lat += index.catalog.poi(m).lat;
      lon += index.catalog.poi(m).lon;
    }
    r.centroid_lat = lat / r.members.size();
    r.centroid_lon = lon / r.members.size();
    r.time_centroid_min = circular_mean_minute(r.time_slots, cfg.slot_minutes);
    index.regions.regions.push_back(std::move(r));
  }
  std::unordered_map<std::uint64_t, int> proj;
  for (const json& jp : j.at("projection"))
    proj[jp.at(0).get<std::uint64_t>()] = jp.at(1).get<int>();
  index.regions.set_projection(std::move(proj),
                               index.catalog.hierarchy().size());

  int n = 1;
  for (const json& jg : j.at("grams"))
    index.grams.sets.emplace_back(n++, jg.get<std::vector<int>>());
  return index;
}

}  // namespace gramshield
