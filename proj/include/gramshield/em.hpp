#ifndef GRAMSHIELD_EM_HPP
#define GRAMSHIELD_EM_HPP

#include <span>
#include <vector>

#include "gramshield/rng.hpp"

namespace gramshield {

// Normalized exponential-mechanism distribution over an enumerated
// candidate set: p_i proportional to exp(-eps * d_i / (2 * delta)).
struct EmDistribution {
  std::vector<double> log_weights;    // -eps * d_i / (2 delta), max-shifted
  std::vector<double> probabilities;  // sums to 1

  size_t size() const { return probabilities.size(); }
};

// Built in log space with max-subtraction, so it stays finite for
// eps * d / delta well beyond anything the pipeline produces.
EmDistribution em_distribution(std::span<const double> distances, double eps,
                               double delta);

// Inverse-CDF draw; half-open cumulative intervals [lo, hi), deterministic
// given the rng state.
int em_sample(const EmDistribution& dist, RngStream& rng);

// Empirical utility tail: the fraction of `trials` draws whose quality
// -d falls below OPT - (2 delta / eps) * (ln(|Y|/|Y_opt|) + zeta).
// The mechanism guarantees this fraction is at most e^-zeta in expectation.
double utility_tail(std::span<const double> distances, double eps,
                    double delta, double zeta, int trials, RngStream& rng);

// Exact tail probability for the same event, from the closed-form
// distribution (test oracle for the sampling-based estimate).
double utility_tail_exact(std::span<const double> distances, double eps,
                          double delta, double zeta);

}  // namespace gramshield

#endif
