#pragma once

#include <cstddef>
#include <string_view>

#include "micontrast/logits.hpp"

namespace micontrast {

enum class Estimator { Cpc, MlCpc };

std::string_view to_string(Estimator kind);
/// Accepts "cpc" and "mlcpc" (also "ml-cpc"); throws std::invalid_argument otherwise.
Estimator parse_estimator(std::string_view text);

struct ObjectiveSpec {
  Estimator kind = Estimator::Cpc;
  double alpha = 1.0;
};

/// Smallest weight for which the re-weighted multi-label objective stays a
/// lower bound on mutual information: m / (n (m - 1) + 1).
double alpha_min(std::size_t n, std::size_t m);

/// Whether `spec` carries a lower-bound guarantee at batch size n with m
/// classes. ML-CPC: alpha in [alpha_min(n, m), 1]. CPC: only alpha == 1.
bool bound_valid(const ObjectiveSpec& spec, std::size_t n, std::size_t m);

/// Re-weighted CPC (alpha == 1 is plain CPC / InfoNCE). Each row is
/// normalised over its own m entries; the positive is weighted by alpha and
/// each negative by (m - alpha) / (m - 1). Throws std::domain_error unless
/// 0 < alpha < m.
double cpc_value(const LogitMatrix& logits, double alpha);

/// Re-weighted multi-label CPC: one normaliser shared by all n positives and
/// n (m - 1) negatives.
double ml_cpc_value(const LogitMatrix& logits, double alpha);

double objective_value(const LogitMatrix& logits, const ObjectiveSpec& spec);

/// d(objective) / d(logit), same shape as the logits.
Matrix objective_grad_logits(const LogitMatrix& logits, const ObjectiveSpec& spec);

struct ObjectiveResult {
  double value = 0.0;
  bool bound_valid = false;
  Matrix grad;
};

/// Value, validity flag and gradient from one pass over the logits.
ObjectiveResult evaluate_objective(const LogitMatrix& logits, const ObjectiveSpec& spec);

/// Geometric interpolation from alpha_start to alpha_end over total_steps.
struct AlphaSchedule {
  double alpha_start = 1.0;
  double alpha_end = 1.0;
  std::size_t total_steps = 1;
};

/// alpha_start * (alpha_end / alpha_start)^(step / total_steps).
/// Throws std::domain_error when step > total_steps or the schedule is invalid.
double schedule_alpha(const AlphaSchedule& schedule, std::size_t step);

}  // namespace micontrast
