#include "gramshield/em.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gramshield {
namespace {

double tail_cutoff(std::span<const double> distances, double eps, double delta,
                   double zeta) {
  const double d_min = *std::min_element(distances.begin(), distances.end());
  size_t n_opt = 0;
  for (double d : distances)
    if (d <= d_min) ++n_opt;
  const double slack =
      (2.0 * delta / eps) *
      (std::log(static_cast<double>(distances.size()) / n_opt) + zeta);
  return d_min + slack;  // draws with d >= cutoff are tail events
}

}  // namespace

EmDistribution em_distribution(std::span<const double> distances, double eps,
                               double delta) {
  if (distances.empty())
    throw std::invalid_argument("exponential mechanism: empty candidate set");
  if (eps <= 0) throw std::invalid_argument("privacy budget must be positive");
  if (delta <= 0) throw std::invalid_argument("sensitivity must be positive");

  EmDistribution dist;
  dist.log_weights.reserve(distances.size());
  for (double d : distances) {
    if (!std::isfinite(d))
      throw std::invalid_argument("exponential mechanism: non-finite distance");
    dist.log_weights.push_back(-eps * d / (2.0 * delta));
  }
  const double max_lw =
      *std::max_element(dist.log_weights.begin(), dist.log_weights.end());
  double z = 0;
  dist.probabilities.reserve(distances.size());
  for (double& lw : dist.log_weights) {
    lw -= max_lw;
    const double w = std::exp(lw);
    dist.probabilities.push_back(w);
    z += w;
  }
  for (double& p : dist.probabilities) p /= z;
  return dist;
}

int em_sample(const EmDistribution& dist, RngStream& rng) {
  const double u = rng.next_double();
  double cum = 0;
  const size_t n = dist.size();
  for (size_t i = 0; i < n; ++i) {
    cum += dist.probabilities[i];
    if (u < cum) return static_cast<int>(i);
  }
  return static_cast<int>(n - 1);  // u landed in the rounding tail
}

double utility_tail(std::span<const double> distances, double eps,
                    double delta, double zeta, int trials, RngStream& rng) {
  if (zeta <= 0) throw std::invalid_argument("zeta must be positive");
  const EmDistribution dist = em_distribution(distances, eps, delta);
  const double cutoff = tail_cutoff(distances, eps, delta, zeta);
  int bad = 0;
  for (int t = 0; t < trials; ++t) {
    const int idx = em_sample(dist, rng);
    if (distances[idx] >= cutoff) ++bad;
  }
  return static_cast<double>(bad) / trials;
}

double utility_tail_exact(std::span<const double> distances, double eps,
                          double delta, double zeta) {
  if (zeta <= 0) throw std::invalid_argument("zeta must be positive");
  const EmDistribution dist = em_distribution(distances, eps, delta);
  const double cutoff = tail_cutoff(distances, eps, delta, zeta);
  double p = 0;
  for (size_t i = 0; i < distances.size(); ++i)
    if (distances[i] >= cutoff) p += dist.probabilities[i];
  return p;
}

}  // namespace gramshield
