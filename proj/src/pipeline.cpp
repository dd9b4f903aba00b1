#include "gramshield/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

namespace gramshield {
namespace {

// Shared, read-only state prepared once per run.
struct MechanismContext {
  const BuildIndex* index = nullptr;
  MechanismKind kind = MechanismKind::NGram;
  double eps = 5.0;
  DistanceParams params;  // combined, from index params

  // region-level (NGram, PhysDist)
  DistanceMatrix region_dist;
  SensitivitySchedule region_sens;

  // POI-level (NGramNoH, Ind*)
  NGramFamily poi_grams;
  DistanceMatrix poi_dist;
  SensitivitySchedule poi_sens;

  double slack_km = NAN;
  long long gamma = kDefaultGamma;
};

MechanismContext make_context(MechanismKind kind, const BuildIndex& index,
                              double eps) {
  MechanismContext ctx;
  ctx.index = &index;
  ctx.kind = kind;
  ctx.eps = eps;
  ctx.params = index.params.distance_params();
  ctx.slack_km = index.params.mbr_slack_km;
  ctx.gamma = index.params.gamma;

  const int n = index.params.n;
  switch (kind) {
    case MechanismKind::NGram:
      ctx.region_dist =
          region_distance_matrix(index.catalog, index.regions, ctx.params);
      ctx.region_sens =
          make_sensitivity_schedule(index.catalog, ctx.params, n);
      break;
    case MechanismKind::PhysDist: {
      DistanceParams space = ctx.params;
      space.space_only = true;
      ctx.region_dist =
          region_distance_matrix(index.catalog, index.regions, space);
      ctx.region_sens = make_sensitivity_schedule(index.catalog, space, n);
      break;
    }
    case MechanismKind::NGramNoH: {
      ctx.poi_grams = build_poi_ngram_family(
          index.catalog, n, index.params.speed().max_kmh(), index.params.g_t,
          index.params.ngram_cap);
      ctx.poi_dist = poi_distance_matrix(index.catalog, ctx.params);
      for (int k = 1; k <= n; ++k)
        ctx.poi_sens.by_length.push_back(
            poi_sensitivity_bound(index.catalog, ctx.params, k));
      break;
    }
    case MechanismKind::IndReach:
    case MechanismKind::IndNoReach:
      ctx.poi_dist = poi_distance_matrix(index.catalog, ctx.params);
      break;
  }
  return ctx;
}

struct TrajResult {
  std::optional<Trajectory> out;
  RunStats stats;
};

TrajResult run_region_level(const MechanismContext& ctx,
                            const Trajectory& traj, RngStream& rng) {
  const BuildIndex& index = *ctx.index;
  const TimeAxis axis = index.params.axis();
  TrajResult res;

  const RegionTrajectory region_path =
      project_trajectory(traj, index.regions, index.catalog, axis);
  const PerturbRecord record = perturb_trajectory(
      region_path, index.grams, ctx.region_dist, ctx.region_sens, ctx.eps,
      rng);
  res.stats.em_calls += record.call_count();
  res.stats.budget_spent += record.call_count() * record.eps_per_call;

  const double slack =
      std::isnan(ctx.slack_km)
          ? default_mbr_slack_km(record, index.regions,
                                 index.params.speed().max_kmh())
          : ctx.slack_km;
  const ReconstructionInstance instance =
      mbr_prune(record, index.regions, index.catalog,
                index.grams.of_length(std::min(2, index.grams.max_n())),
                ctx.region_dist, slack);
  const RegionPathResult solved = solve_region_path(instance);
  if (solved.fallback) ++res.stats.dp_fallbacks;

  PoiSampleStats sample_stats;
  auto out = sample_poi_trajectory(solved.path, index.regions, index.catalog,
                                   axis, index.params.speed(), ctx.gamma, rng,
                                   &sample_stats);
  res.stats.sample_attempts += sample_stats.attempts;
  res.stats.smoothing_invoked += sample_stats.smoothing_invoked;
  res.stats.region_changed_points += sample_stats.region_changed_points;
  if (!out) {
    ++res.stats.dropped;
    return res;
  }
  out->user = traj.user;
  res.out = std::move(out);
  return res;
}

TrajResult run_noh(const MechanismContext& ctx, const Trajectory& traj,
                   RngStream& rng) {
  const BuildIndex& index = *ctx.index;
  const TimeAxis axis = index.params.axis();
  TrajResult res;

  const NoHRecord rec =
      perturb_ngram_noh(traj, ctx.poi_grams, ctx.poi_dist, ctx.poi_sens, axis,
                        ctx.params, ctx.eps, rng);
  res.stats.em_calls +=
      rec.poi_record.call_count() + static_cast<int>(rec.perturbed_steps.size());
  res.stats.budget_spent +=
      (rec.poi_record.call_count() +
       static_cast<double>(rec.perturbed_steps.size())) *
      rec.eps_per_call;

  // slack from the released timestep envelope
  double slack = ctx.slack_km;
  if (std::isnan(slack)) {
    int lo = rec.perturbed_steps.front(), hi = lo;
    for (int t : rec.perturbed_steps) {
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
    const double span_min =
        std::max((hi - lo) * axis.step_minutes, index.params.slot_minutes);
    slack = index.params.speed_kmh * span_min / 60.0;
  }
  const RegionPathResult solved = solve_poi_path(
      rec.poi_record, index.catalog,
      ctx.poi_grams.of_length(std::min(2, ctx.poi_grams.max_n())),
      ctx.poi_dist, slack);
  if (solved.fallback) ++res.stats.dp_fallbacks;

  Trajectory out;
  out.user = traj.user;
  out.points.resize(solved.path.size());
  for (size_t i = 0; i < solved.path.size(); ++i)
    out.points[i] = TrajPoint{solved.path[i], rec.perturbed_steps[i]};
  if (validate_trajectory(out, index.catalog, axis, index.params.speed())) {
    ++res.stats.smoothing_invoked;
    if (!time_smooth(out.points, index.catalog, axis,
                     index.params.speed())) {
      ++res.stats.dropped;
      return res;
    }
  }
  res.out = std::move(out);
  return res;
}

TrajResult run_independent(const MechanismContext& ctx, const Trajectory& traj,
                           RngStream& rng, bool enforce_reach) {
  const BuildIndex& index = *ctx.index;
  TrajResult res;
  IndependentStats st;
  auto out = perturb_independent(traj, index.catalog, ctx.poi_dist,
                                 index.params.axis(), ctx.params,
                                 index.params.speed(), ctx.eps, enforce_reach,
                                 rng, &st);
  res.stats.em_calls += traj.length();
  res.stats.budget_spent += ctx.eps;
  res.stats.reach_fallbacks += st.restricted_fallbacks;
  if (st.smoothed) ++res.stats.smoothing_invoked;
  if (!out) {
    ++res.stats.dropped;
    return res;
  }
  res.out = std::move(out);
  return res;
}

TrajResult run_one(const MechanismContext& ctx, const Trajectory& traj,
                   RngStream& rng) {
  switch (ctx.kind) {
    case MechanismKind::NGram:
    case MechanismKind::PhysDist:
      return run_region_level(ctx, traj, rng);
    case MechanismKind::NGramNoH:
      return run_noh(ctx, traj, rng);
    case MechanismKind::IndReach:
      return run_independent(ctx, traj, rng, true);
    case MechanismKind::IndNoReach:
      return run_independent(ctx, traj, rng, false);
  }
  throw std::logic_error("unhandled mechanism");
}

void accumulate(RunStats& into, const RunStats& one) {
  into.em_calls += one.em_calls;
  into.budget_spent += one.budget_spent;
  into.sample_attempts += one.sample_attempts;
  into.smoothing_invoked += one.smoothing_invoked;
  into.dp_fallbacks += one.dp_fallbacks;
  into.reach_fallbacks += one.reach_fallbacks;
  into.region_changed_points += one.region_changed_points;
  into.dropped += one.dropped;
}

}  // namespace

PerturbRun run_mechanism(MechanismKind kind, const BuildIndex& index,
                         const TrajectorySet& input, double eps,
                         std::uint64_t seed, int jobs) {
  const MechanismContext ctx = make_context(kind, index, eps);
  const RngStream master(seed);

  std::vector<TrajResult> results(input.size());
  std::atomic<size_t> cursor{0};
  std::mutex first_error_mutex;
  std::exception_ptr first_error;

  auto worker = [&]() {
    while (true) {
      const size_t i = cursor.fetch_add(1);
      if (i >= input.size()) return;
      try {
        RngStream sub = master.substream(i);
        results[i] = run_one(ctx, input[i], sub);
      } catch (...) {
        std::lock_guard<std::mutex> lock(first_error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const int threads = std::max(1, jobs);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  PerturbRun run;
  for (size_t i = 0; i < input.size(); ++i) {
    accumulate(run.stats, results[i].stats);
    if (results[i].out)
      run.output.push_back(std::move(*results[i].out));
    else
      run.dropped_users.push_back(input[i].user);
  }
  return run;
}

std::optional<Trajectory> perturb_one_ngram(const BuildIndex& index,
                                            const Trajectory& traj, double eps,
                                            RngStream& rng, RunStats* stats) {
  const MechanismContext ctx =
      make_context(MechanismKind::NGram, index, eps);
  TrajResult res = run_region_level(ctx, traj, rng);
  if (stats) *stats = res.stats;
  return res.out;
}

}  // namespace gramshield
