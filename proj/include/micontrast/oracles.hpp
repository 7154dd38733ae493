#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include "micontrast/numerics.hpp"

namespace micontrast {

/// Two-point world: (X, Y) = (1, 1) with probability p, (0, 0) otherwise.
/// The critic scores matched pairs exp(match_logit) and mismatched pairs
/// exp(mismatch_logit); an empty mismatch_logit is the hard critic whose
/// mismatch weight is exactly zero.
struct BinaryWorld {
  double p = 0.5;
  double match_logit = 0.0;
  std::optional<double> mismatch_logit;
};

/// Mean and variance of the single-batch estimate.
struct OracleStats {
  double mean = 0.0;
  double variance = 0.0;
};

/// I(X; Y) of the two-point world, the binary entropy H(p) in nats.
double binary_true_mi(double p);

/// Exact re-weighted CPC statistics for batches of n pairs, each row using
/// the other n - 1 batch labels as negatives (m = n). Enumerates the number
/// t of (1, 1) pairs with Binomial(n, p) weights.
/// Throws std::domain_error unless n >= 2 and 0 < alpha < n.
OracleStats binary_cpc_oracle(const BinaryWorld& world, std::size_t n, double alpha);

/// Exact re-weighted ML-CPC statistics with n positives and n (m - 1)
/// negatives drawn independently from the marginal Bernoulli(p).
/// Throws std::domain_error unless n >= 1, m >= 2 and 0 < alpha < m.
OracleStats binary_mlcpc_oracle(const BinaryWorld& world, std::size_t n, std::size_t m,
                                double alpha);

/// -(d / 2) ln(1 - rho^2) for d independent bivariate normal coordinates.
double gaussian_true_mi(std::size_t d, double rho);

/// Correlation giving a d-dimensional Gaussian pair the requested MI.
double rho_for_mi(std::size_t d, double mi);

enum class PositiveSampler { Exponential, LogNormal };

std::string_view to_string(PositiveSampler sampler);
PositiveSampler parse_positive_sampler(std::string_view text);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Monte-Carlo mean of (1/n) sum_i m X_i / (alpha X_i + beta sum_j Xbar_ij)
/// with beta = (m - alpha) / (m - 1) and all variables i.i.d. positive.
/// alpha must lie in (0, max(2m / (m + 1), m / 2)].
MonteCarloEstimate exchangeable_bound_mc(Rng& rng, std::size_t n, std::size_t m, double alpha,
                                         PositiveSampler sampler, std::size_t trials);

/// Upper bound on the exchangeable statistic's expectation: 1 / alpha for
/// alpha <= 1 and 1 above. The 1 / alpha form is sometimes quoted up to
/// alpha = 2m / (m + 1), but it fails on (1, 2m / (m + 1)] for every
/// non-degenerate distribution.
double exchangeable_bound(std::size_t m, double alpha);

}  // namespace micontrast
