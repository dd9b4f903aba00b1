// gramshield: perturb spatio-temporal trajectories under strict epsilon-LDP
// using hierarchically structured, overlapping n-grams, then reconstruct
// realistic outputs and evaluate their utility.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gramshield/csv.hpp"
#include "gramshield/datagen.hpp"
#include "gramshield/metrics.hpp"
#include "gramshield/oracle.hpp"
#include "gramshield/pipeline.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace gramshield;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_file(const std::string& path, const char* what) {
  if (!fs::exists(path))
    throw UsageError(std::string(what) + " not found: " + path);
}

double wall_seconds_since(
    const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

int cmd_build(const std::string& pois, const std::string& hierarchy,
              const std::string& config_path, const std::string& out_dir) {
  require_file(pois, "POI file");
  require_file(hierarchy, "hierarchy file");
  if (!config_path.empty()) require_file(config_path, "config file");
  const RunConfig cfg = load_config(config_path);

  const auto start = std::chrono::steady_clock::now();
  BuildIndex index = build_index(PoiCatalog::load(pois, hierarchy), cfg);
  save_index(index, out_dir);
  const double secs = wall_seconds_since(start);

  json manifest;
  manifest["params"] = {{"g_t", cfg.g_t},
                        {"g_s", cfg.g_s},
                        {"slot_minutes", cfg.slot_minutes},
                        {"kappa", cfg.kappa},
                        {"merge_order", cfg.merge_order},
                        {"n", cfg.n},
                        {"speed_kmh", cfg.speed_kmh},
                        {"ngram_cap", cfg.ngram_cap}};
  manifest["pois"] = index.catalog.size();
  manifest["regions"] = index.regions.size();
  json gram_sizes = json::array();
  for (const NGramSet& s : index.grams.sets) gram_sizes.push_back(s.size());
  manifest["gram_set_sizes"] = std::move(gram_sizes);
  manifest["build_seconds"] = secs;
  std::ofstream mout(fs::path(out_dir) / "build_manifest.json");
  mout << manifest.dump(2) << '\n';

  std::cout << "built index: " << index.catalog.size() << " POIs, "
            << index.regions.size() << " regions";
  for (size_t k = 0; k < index.grams.sets.size(); ++k)
    std::cout << ", |W^" << (k + 1) << "| = " << index.grams.sets[k].size();
  std::cout << " (" << std::fixed << std::setprecision(2) << secs << "s)\n";
  return 0;
}

int cmd_perturb(const std::string& index_dir, const std::string& traj_path,
                const std::string& mechanism, double eps, bool eps_set,
                std::uint64_t cli_seed, bool seed_set,
                const std::string& out_path, int jobs) {
  require_file((fs::path(index_dir) / "index.json").string(), "index");
  require_file(traj_path, "trajectory file");
  const auto kind = parse_mechanism(mechanism);
  if (!kind)
    throw UsageError("unknown mechanism '" + mechanism +
                     "' (ngram, ngram-noh, phys-dist, ind-reach, ind-noreach)");

  BuildIndex index = load_index(index_dir);
  if (eps_set) {
    if (eps <= 0) throw UsageError("epsilon must be positive");
    index.params.epsilon = eps;
  }
  const std::uint64_t seed = resolve_seed(index.params, seed_set, cli_seed);

  const TrajectorySet raw = read_trajectories_jsonl(traj_path, index.catalog);
  const FilterOutcome filtered = filter_trajectories(
      raw, index.catalog, index.params.axis(), index.params.speed());

  PerturbRun run = run_mechanism(*kind, index, filtered.kept,
                                 index.params.epsilon, seed, jobs);
  write_trajectories_jsonl(out_path, run.output, index.catalog);

  json manifest;
  manifest["mechanism"] = mechanism_name(*kind);
  manifest["epsilon"] = index.params.epsilon;
  manifest["n"] = index.params.n;
  manifest["seed"] = seed;
  manifest["index_dir"] = index_dir;
  manifest["trajectory_file"] = traj_path;
  manifest["input_trajectories"] = raw.size();
  manifest["filtered_out"] = {
      {"non-monotone",
       filtered.drop_count(InfeasibleReason::NonMonotone)},
      {"closed", filtered.drop_count(InfeasibleReason::Closed)},
      {"unreachable", filtered.drop_count(InfeasibleReason::Unreachable)}};
  manifest["perturbed_trajectories"] = run.output.size();
  manifest["em_calls"] = run.stats.em_calls;
  manifest["budget_spent_total"] = run.stats.budget_spent;
  // per-call budget by trajectory length (the split depends on |tau|)
  {
    std::map<int, int> lengths;
    for (const Trajectory& t : filtered.kept) ++lengths[t.length()];
    json eps_by_len = json::object();
    for (const auto& [len, count] : lengths) {
      const int n = std::min(index.params.n, len);
      const double calls = *kind == MechanismKind::NGramNoH
                               ? 2 * len + n - 1
                               : (*kind == MechanismKind::IndReach ||
                                  *kind == MechanismKind::IndNoReach)
                                     ? len
                                     : len + n - 1;
      eps_by_len[std::to_string(len)] = {
          {"trajectories", count},
          {"calls_per_trajectory", calls},
          {"eps_per_call", index.params.epsilon / calls}};
    }
    manifest["budget_split_by_length"] = std::move(eps_by_len);
  }
  manifest["sensitivity"] = "analytic-upper-bound";
  manifest["smoothing_invoked"] = run.stats.smoothing_invoked;
  manifest["smoothing_rate"] =
      filtered.kept.empty()
          ? 0.0
          : static_cast<double>(run.stats.smoothing_invoked) /
                filtered.kept.size();
  manifest["region_changed_points"] = run.stats.region_changed_points;
  manifest["dp_fallbacks"] = run.stats.dp_fallbacks;
  manifest["reach_fallbacks"] = run.stats.reach_fallbacks;
  manifest["dropped_unsmoothable"] = run.stats.dropped;
  manifest["dropped_users"] = run.dropped_users;
  std::ofstream mout(out_path + ".manifest.json");
  mout << manifest.dump(2) << '\n';

  std::cout << mechanism_name(*kind) << ": perturbed " << run.output.size()
            << "/" << filtered.kept.size() << " trajectories (eps = "
            << index.params.epsilon << ", seed = " << seed << ")\n";
  return 0;
}

int cmd_evaluate(const std::string& index_dir, const std::string& real_path,
                 const std::string& pert_path, const std::string& out_csv) {
  require_file((fs::path(index_dir) / "index.json").string(), "index");
  require_file(real_path, "real trajectory file");
  require_file(pert_path, "perturbed trajectory file");
  const BuildIndex index = load_index(index_dir);
  const TimeAxis axis = index.params.axis();
  const DistanceParams params = index.params.distance_params();

  TrajectorySet real_all = read_trajectories_jsonl(real_path, index.catalog);
  TrajectorySet pert = read_trajectories_jsonl(pert_path, index.catalog);

  // pair by user id; perturbed runs may have dropped a few trajectories
  std::unordered_map<std::string, const Trajectory*> by_user;
  for (const Trajectory& t : real_all) by_user[t.user] = &t;
  TrajectorySet real;
  for (const Trajectory& t : pert) {
    auto it = by_user.find(t.user);
    if (it == by_user.end())
      throw UsageError("perturbed user '" + t.user +
                       "' does not appear in the real set");
    real.push_back(*it->second);
  }

  std::vector<std::array<std::string, 3>> rows;
  auto add = [&](const std::string& metric, const std::string& gran,
                 double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", value);
    rows.push_back({metric, gran, buf});
  };

  for (Dimension dim : {Dimension::Time, Dimension::Category,
                        Dimension::Space, Dimension::Combined})
    add("ne", dimension_name(dim),
        normalized_error(real, pert, dim, index.catalog, axis, params));

  const std::vector<std::pair<Dimension, std::vector<double>>> prq_deltas = {
      {Dimension::Space, {0.1, 0.5, 1.0, 2.0}},
      {Dimension::Time, {0.5, 1.0, 2.0}},
      {Dimension::Category, {0.0, 3.5, 7.0}}};
  for (const auto& [dim, deltas] : prq_deltas) {
    for (double delta : deltas) {
      char gran[48];
      std::snprintf(gran, sizeof(gran), "%s<=%g", dimension_name(dim), delta);
      add("prq", gran,
          prq(real, pert, dim, delta, index.catalog, axis, params));
    }
  }

  for (HotspotGranularity g :
       {HotspotGranularity::Poi, HotspotGranularity::Grid4,
        HotspotGranularity::Grid2, HotspotGranularity::Cat1,
        HotspotGranularity::Cat2, HotspotGranularity::Cat3}) {
    const int eta = default_eta(g);
    const auto hr = detect_hotspots(real, g, eta, index.catalog, axis);
    const auto hp = detect_hotspots(pert, g, eta, index.catalog, axis);
    add("hotspots_real", granularity_name(g), static_cast<double>(hr.size()));
    add("hotspots_pert", granularity_name(g), static_cast<double>(hp.size()));
    const auto a = ahd(hr, hp, axis);
    const auto c = acd(hr, hp, axis);
    if (a) add("ahd", granularity_name(g), *a);
    if (c) add("acd", granularity_name(g), *c);
  }

  std::ofstream csv(out_csv, std::ios::binary);
  if (!csv) throw std::runtime_error("cannot write " + out_csv);
  csv << "metric,granularity,value\n";
  for (const auto& r : rows) csv << r[0] << ',' << r[1] << ',' << r[2] << '\n';

  std::cout << std::left << std::setw(16) << "metric" << std::setw(18)
            << "granularity" << "value\n";
  for (const auto& r : rows)
    std::cout << std::left << std::setw(16) << r[0] << std::setw(18) << r[1]
              << r[2] << '\n';
  return 0;
}

int cmd_datagen(const std::string& pois, const std::string& hierarchy,
                const std::string& config_path, int count_override,
                std::uint64_t cli_seed, bool seed_set,
                const std::string& out_path,
                const std::string& emit_catalog_dir) {
  if (!config_path.empty()) require_file(config_path, "config file");
  RunConfig cfg = load_config(config_path);
  if (count_override >= 0) cfg.datagen.count = count_override;

  PoiCatalog catalog = [&] {
    if (!pois.empty()) {
      require_file(pois, "POI file");
      require_file(hierarchy, "hierarchy file");
      return PoiCatalog::load(pois, hierarchy);
    }
    return make_campus_catalog();
  }();

  if (!emit_catalog_dir.empty()) {
    fs::create_directories(emit_catalog_dir);
    write_catalog_csv(catalog,
                      (fs::path(emit_catalog_dir) / "pois.csv").string(),
                      (fs::path(emit_catalog_dir) / "hierarchy.csv").string());
  }

  const std::uint64_t seed = resolve_seed(cfg, seed_set, cli_seed);
  RngStream rng(seed);
  const TrajectorySet set =
      generate_campus(catalog, cfg.axis(), cfg.speed(), cfg.datagen, rng);
  write_trajectories_jsonl(out_path, set, catalog);
  std::cout << "generated " << set.size() << " trajectories (seed = " << seed
            << ")\n";
  return 0;
}

int cmd_oracle(const std::string& cardinality_spec, const std::string& pois,
               const std::string& hierarchy, const std::string& traj_path,
               int len, double eps, std::uint64_t cli_seed, bool seed_set,
               const std::string& out_path, const std::string& config_path) {
  if (!cardinality_spec.empty()) {
    const auto f = split_csv_line(cardinality_spec);
    if (f.size() != 4)
      throw UsageError("--cardinality needs P,len,g_t,mu");
    const double v = cardinality_s(std::stod(f[0]), std::stoi(f[1]),
                                   std::stoi(f[2]), std::stod(f[3]));
    std::cout << "|S| <= " << std::scientific << std::setprecision(4) << v
              << '\n';
    return 0;
  }

  require_file(pois, "POI file");
  require_file(hierarchy, "hierarchy file");
  if (!config_path.empty()) require_file(config_path, "config file");
  RunConfig cfg = load_config(config_path);
  const PoiCatalog catalog = PoiCatalog::load(pois, hierarchy);
  const TimeAxis axis = cfg.axis();

  std::vector<std::vector<TrajPoint>> s;
  try {
    s = enumerate_s(catalog, axis, len, cfg.speed());
  } catch (const OracleGuardExceeded&) {
    const double bound = cardinality_s(catalog.size(), len, cfg.g_t, 1.0);
    std::cout << "refusing to enumerate S: worst-case |S| = "
              << std::scientific << std::setprecision(4) << bound
              << " exceeds the guard of " << kEnumerationGuard << '\n';
    return 1;
  }
  std::cout << "|S| = " << s.size() << " feasible trajectories of length "
            << len << '\n';

  if (!traj_path.empty()) {
    require_file(traj_path, "trajectory file");
    const std::uint64_t seed = resolve_seed(cfg, seed_set, cli_seed);
    RngStream rng(seed);
    const TrajectorySet input = read_trajectories_jsonl(traj_path, catalog);
    TrajectorySet output;
    const DistanceParams params = cfg.distance_params();
    for (size_t i = 0; i < input.size(); ++i) {
      RngStream sub = rng.substream(i);
      Trajectory out;
      out.user = input[i].user;
      out.points = global_perturb(input[i].points, s, catalog, axis, params,
                                  eps > 0 ? eps : cfg.epsilon, sub);
      output.push_back(std::move(out));
    }
    if (!out_path.empty())
      write_trajectories_jsonl(out_path, output, catalog);
    std::cout << "globally perturbed " << output.size() << " trajectories\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "gramshield: epsilon-LDP trajectory sharing via hierarchical "
      "overlapping n-grams"};
  app.require_subcommand(1);

  // build
  auto* build = app.add_subcommand("build", "build and serialize the region "
                                            "and n-gram index");
  std::string b_pois, b_hier, b_config, b_out;
  build->add_option("--pois", b_pois, "POI CSV")->required();
  build->add_option("--hierarchy", b_hier, "category hierarchy CSV")
      ->required();
  build->add_option("--config", b_config, "key = value config file");
  build->add_option("--out", b_out, "output index directory")->required();

  // perturb
  auto* perturb = app.add_subcommand(
      "perturb", "perturb a trajectory set with one mechanism");
  std::string p_index, p_traj, p_mech = "ngram", p_out;
  double p_eps = -1;
  std::uint64_t p_seed = 0;
  int p_jobs = 1;
  perturb->add_option("--index", p_index, "index directory")->required();
  perturb->add_option("--trajectories", p_traj, "input JSONL")->required();
  perturb->add_option("--mechanism", p_mech,
                      "ngram | ngram-noh | phys-dist | ind-reach | "
                      "ind-noreach");
  auto* eps_opt = perturb->add_option("--epsilon", p_eps, "privacy budget");
  auto* p_seed_opt = perturb->add_option("--seed", p_seed, "rng seed");
  perturb->add_option("--out", p_out, "output JSONL")->required();
  perturb->add_option("--jobs", p_jobs, "worker threads");

  // evaluate
  auto* evaluate = app.add_subcommand(
      "evaluate", "compare real and perturbed trajectory sets");
  std::string e_index, e_real, e_pert, e_out = "metrics.csv";
  evaluate->add_option("--index", e_index, "index directory")->required();
  evaluate->add_option("--real", e_real, "real JSONL")->required();
  evaluate->add_option("--perturbed", e_pert, "perturbed JSONL")->required();
  evaluate->add_option("--out", e_out, "metrics CSV path");

  // datagen
  auto* datagen = app.add_subcommand(
      "datagen", "generate synthetic campus-style trajectories");
  std::string d_pois, d_hier, d_config, d_out, d_emit;
  int d_count = -1;
  std::uint64_t d_seed = 0;
  datagen->add_option("--pois", d_pois, "POI CSV (default: built-in campus)");
  datagen->add_option("--hierarchy", d_hier, "category hierarchy CSV");
  datagen->add_option("--config", d_config, "key = value config file");
  datagen->add_option("--count", d_count, "number of trajectories");
  auto* d_seed_opt = datagen->add_option("--seed", d_seed, "rng seed");
  datagen->add_option("--out", d_out, "output JSONL")->required();
  datagen->add_option("--emit-catalog", d_emit,
                      "also write the catalog CSVs to this directory");

  // oracle
  auto* oracle = app.add_subcommand(
      "oracle", "desk-scale global solution and cardinality checks");
  std::string o_card, o_pois, o_hier, o_traj, o_out, o_config;
  int o_len = 2;
  double o_eps = -1;
  std::uint64_t o_seed = 0;
  oracle->add_option("--cardinality", o_card,
                     "print |S| bound for P,len,g_t,mu");
  oracle->add_option("--pois", o_pois, "POI CSV");
  oracle->add_option("--hierarchy", o_hier, "category hierarchy CSV");
  oracle->add_option("--trajectories", o_traj,
                     "trajectories to perturb globally");
  oracle->add_option("--len", o_len, "trajectory length for enumeration");
  oracle->add_option("--epsilon", o_eps, "privacy budget");
  auto* o_seed_opt = oracle->add_option("--seed", o_seed, "rng seed");
  oracle->add_option("--out", o_out, "output JSONL");
  oracle->add_option("--config", o_config, "key = value config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (build->parsed()) return cmd_build(b_pois, b_hier, b_config, b_out);
    if (perturb->parsed())
      return cmd_perturb(p_index, p_traj, p_mech, p_eps, eps_opt->count() > 0,
                         p_seed, p_seed_opt->count() > 0, p_out, p_jobs);
    if (evaluate->parsed())
      return cmd_evaluate(e_index, e_real, e_pert, e_out);
    if (datagen->parsed())
      return cmd_datagen(d_pois, d_hier, d_config, d_count, d_seed,
                         d_seed_opt->count() > 0, d_out, d_emit);
    if (oracle->parsed())
      return cmd_oracle(o_card, o_pois, o_hier, o_traj, o_len, o_eps, o_seed,
                        o_seed_opt->count() > 0, o_out, o_config);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const LoadError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const gramshield::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
