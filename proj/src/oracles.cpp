#include "micontrast/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace micontrast {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("probability must lie in [0, 1]");
}

// Binomial(trials, p) probability mass for every outcome 0..trials.
std::vector<double> binomial_pmf(std::size_t trials, double p) {
  std::vector<double> pmf(trials + 1, 0.0);
  if (p == 0.0) {
    pmf[0] = 1.0;
    return pmf;
  }
  if (p == 1.0) {
    pmf[trials] = 1.0;
    return pmf;
  }
  const double nd = static_cast<double>(trials);
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  for (std::size_t k = 0; k <= trials; ++k) {
    const double kd = static_cast<double>(k);
    const double log_choose = std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) -
                              std::lgamma(nd - kd + 1.0);
    pmf[k] = std::exp(log_choose + kd * log_p + (nd - kd) * log_q);
  }
  return pmf;
}

double log_count(std::size_t count) {
  return count == 0 ? kNegInf : std::log(static_cast<double>(count));
}

// log(alpha_mass * g_match + beta * (matches * g_match + mismatches * g_mismatch))
double log_denominator(const BinaryWorld& world, double log_alpha_mass, double log_beta,
                       std::size_t matches, std::size_t mismatches) {
  double terms[3] = {log_alpha_mass + world.match_logit,
                     log_beta + log_count(matches) + world.match_logit, kNegInf};
  if (world.mismatch_logit.has_value() && mismatches > 0) {
    terms[2] = log_beta + log_count(mismatches) + *world.mismatch_logit;
  }
  return logsumexp(terms);
}

void check_world(const BinaryWorld& world) {
  check_probability(world.p);
  if (!std::isfinite(world.match_logit)) throw std::domain_error("match_logit must be finite");
  if (world.mismatch_logit.has_value() && !std::isfinite(*world.mismatch_logit)) {
    throw std::domain_error("mismatch_logit must be finite when given");
  }
}

void check_alpha(double alpha, std::size_t m) {
  if (!(alpha > 0.0) || !(alpha < static_cast<double>(m))) {
    throw std::domain_error("oracle: alpha must satisfy 0 < alpha < m (alpha=" +
                            std::to_string(alpha) + ", m=" + std::to_string(m) + ")");
  }
}

OracleStats moments(const std::vector<double>& probability, const std::vector<double>& value) {
  OracleStats stats;
  for (std::size_t k = 0; k < value.size(); ++k) {
    if (probability[k] > 0.0) stats.mean += probability[k] * value[k];
  }
  for (std::size_t k = 0; k < value.size(); ++k) {
    if (probability[k] > 0.0) {
      const double diff = value[k] - stats.mean;
      stats.variance += probability[k] * diff * diff;
    }
  }
  return stats;
}

}  // namespace

double binary_true_mi(double p) {
  check_probability(p);
  double h = 0.0;
  if (p > 0.0) h -= p * std::log(p);
  if (p < 1.0) h -= (1.0 - p) * std::log1p(-p);
  return h;
}

OracleStats binary_cpc_oracle(const BinaryWorld& world, std::size_t n, double alpha) {
  check_world(world);
  if (n < 2) throw std::domain_error("binary_cpc_oracle: n must be >= 2");
  check_alpha(alpha, n);
  const double nd = static_cast<double>(n);
  const double log_alpha = std::log(alpha);
  const double log_beta = std::log((nd - alpha) / (nd - 1.0));
  const double log_n = std::log(nd);

  // A row whose label group has `same` members (itself included) sees
  // same - 1 matching and n - same mismatching negatives.
  auto row_value = [&](std::size_t same) {
    return log_n + world.match_logit -
           log_denominator(world, log_alpha, log_beta, same - 1, n - same);
  };

  const auto weights = binomial_pmf(n, world.p);
  std::vector<double> values(n + 1, 0.0);
  for (std::size_t t = 0; t <= n; ++t) {
    double total = 0.0;
    if (t > 0) total += static_cast<double>(t) * row_value(t);
    if (t < n) total += static_cast<double>(n - t) * row_value(n - t);
    values[t] = total / nd;
  }
  return moments(weights, values);
}

OracleStats binary_mlcpc_oracle(const BinaryWorld& world, std::size_t n, std::size_t m,
                                double alpha) {
  check_world(world);
  if (n < 1) throw std::domain_error("binary_mlcpc_oracle: n must be >= 1");
  if (m < 2) throw std::domain_error("binary_mlcpc_oracle: m must be >= 2");
  check_alpha(alpha, m);
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  const std::size_t negatives = n * (m - 1);

  // Every positive pair matches; the batch value depends only on the number
  // s of matching negatives. Negatives on x=1 rows match with probability p,
  // on x=0 rows with probability 1 - p.
  std::vector<double> s_pmf(negatives + 1, 0.0);
  const auto t_pmf = binomial_pmf(n, world.p);
  for (std::size_t t = 0; t <= n; ++t) {
    if (t_pmf[t] == 0.0) continue;
    const auto on_ones = binomial_pmf(t * (m - 1), world.p);
    const auto on_zeros = binomial_pmf((n - t) * (m - 1), 1.0 - world.p);
    for (std::size_t a = 0; a < on_ones.size(); ++a) {
      if (on_ones[a] == 0.0) continue;
      const double pa = t_pmf[t] * on_ones[a];
      for (std::size_t b = 0; b < on_zeros.size(); ++b) s_pmf[a + b] += pa * on_zeros[b];
    }
  }

  const double log_alpha_mass = std::log(alpha * nd);
  const double log_beta = std::log((md - alpha) / (md - 1.0));
  const double log_nm = std::log(nd * md);
  std::vector<double> values(negatives + 1);
  for (std::size_t s = 0; s <= negatives; ++s) {
    values[s] = log_nm + world.match_logit -
                log_denominator(world, log_alpha_mass, log_beta, s, negatives - s);
  }
  return moments(s_pmf, values);
}

double gaussian_true_mi(std::size_t d, double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) throw std::domain_error("gaussian_true_mi: rho must be in [0, 1)");
  return -0.5 * static_cast<double>(d) * std::log1p(-rho * rho);
}

double rho_for_mi(std::size_t d, double mi) {
  if (d == 0) throw std::domain_error("rho_for_mi: d must be positive");
  if (!(mi >= 0.0) || !std::isfinite(mi)) throw std::domain_error("rho_for_mi: mi must be >= 0");
  return std::sqrt(-std::expm1(-2.0 * mi / static_cast<double>(d)));
}

std::string_view to_string(PositiveSampler sampler) {
  return sampler == PositiveSampler::Exponential ? "exponential" : "lognormal";
}

PositiveSampler parse_positive_sampler(std::string_view text) {
  if (text == "exponential" || text == "exp") return PositiveSampler::Exponential;
  if (text == "lognormal" || text == "log-normal") return PositiveSampler::LogNormal;
  throw std::invalid_argument("unknown sampler '" + std::string(text) + "'");
}

double exchangeable_bound(std::size_t m, double alpha) {
  if (m < 2) throw std::domain_error("exchangeable_bound: m must be >= 2");
  const double md = static_cast<double>(m);
  if (!(alpha > 0.0 && alpha <= std::max(2.0 * md / (md + 1.0), md / 2.0))) {
      throw std::domain_error("exchangeable_bound: alpha outside (0, max(2m/(m+1), m/2)]");
  }
  return alpha <= 1.0 ? 1.0 / alpha : 1.0;
}

MonteCarloEstimate exchangeable_bound_mc(Rng& rng, std::size_t n, std::size_t m, double alpha,
                                         PositiveSampler sampler, std::size_t trials) {
  if (n < 1) throw std::domain_error("exchangeable_bound_mc: n must be >= 1");
  if (trials < 2) throw std::domain_error("exchangeable_bound_mc: need at least 2 trials");
  exchangeable_bound(m, alpha);  // range check
  const double md = static_cast<double>(m);
  const double beta = (md - alpha) / (md - 1.0);

  auto draw = [&] {
    const double v = sampler == PositiveSampler::Exponential ? -std::log(rng.uniform_open())
                                                             : std::exp(rng.normal());
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::logic_error("exchangeable_bound_mc: sampler produced a non-positive value");
    }
    return v;
  };

  // Welford accumulation over trials.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    double statistic = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double positive = draw();
      double negatives = 0.0;
      for (std::size_t j = 0; j + 1 < m; ++j) negatives += draw();
      statistic += md * positive / (alpha * positive + beta * negatives);
    }
    statistic /= static_cast<double>(n);
    const double delta = statistic - mean;
    mean += delta / static_cast<double>(trial + 1);
    m2 += delta * (statistic - mean);
  }
  const double variance = m2 / static_cast<double>(trials - 1);
  return {mean, std::sqrt(variance / static_cast<double>(trials))};
}

}  // namespace micontrast
