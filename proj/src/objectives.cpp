#include "micontrast/objectives.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace micontrast {

LogitMatrix::LogitMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() < 1) throw std::invalid_argument("LogitMatrix: need n >= 1");
  if (values_.cols() < 2) throw std::invalid_argument("LogitMatrix: need m >= 2");
  if (!values_.all_finite()) throw std::invalid_argument("LogitMatrix: non-finite entry");
}

LogitMatrix::LogitMatrix(std::size_t n, std::size_t m, double fill)
    : LogitMatrix(Matrix(n, m, fill)) {}

std::string_view to_string(Estimator kind) {
  return kind == Estimator::Cpc ? "cpc" : "mlcpc";
}

Estimator parse_estimator(std::string_view text) {
  if (text == "cpc") return Estimator::Cpc;
  if (text == "mlcpc" || text == "ml-cpc") return Estimator::MlCpc;
  throw std::invalid_argument("unknown objective '" + std::string(text) + "'");
}

double alpha_min(std::size_t n, std::size_t m) {
  if (m < 2) throw std::domain_error("alpha_min: m must be >= 2");
  if (n < 1) throw std::domain_error("alpha_min: n must be >= 1");
  const double md = static_cast<double>(m);
  return md / (static_cast<double>(n) * (md - 1.0) + 1.0);
}

bool bound_valid(const ObjectiveSpec& spec, std::size_t n, std::size_t m) {
  if (spec.kind == Estimator::Cpc) return spec.alpha == 1.0;
  return spec.alpha >= alpha_min(n, m) && spec.alpha <= 1.0;
}

namespace {

struct Weights {
  double log_pos;
  double log_neg;
};

Weights log_weights(double alpha, std::size_t m) {
  const double md = static_cast<double>(m);
  if (!(alpha > 0.0) || !(alpha < md)) {
    throw std::domain_error("objective: alpha must satisfy 0 < alpha < m (alpha=" +
                            std::to_string(alpha) + ", m=" + std::to_string(m) + ")");
  }
  return {std::log(alpha), std::log((md - alpha) / (md - 1.0))};
}

// Value and (optionally) gradient of the row-normalised objective.
double cpc_impl(const LogitMatrix& logits, double alpha, Matrix* grad) {
  const std::size_t n = logits.n();
  const std::size_t m = logits.m();
  const Weights w = log_weights(alpha, m);
  const double log_m = std::log(static_cast<double>(m));
  const double inv_n = 1.0 / static_cast<double>(n);

  std::vector<double> shifted(m);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = logits.row(i);
    shifted[0] = row[0] + w.log_pos;
    for (std::size_t j = 1; j < m; ++j) shifted[j] = row[j] + w.log_neg;
    const double z = logsumexp(shifted);
    total += log_m + row[0] - z;
    if (grad != nullptr) {
      for (std::size_t j = 0; j < m; ++j) {
        (*grad)(i, j) = -inv_n * std::exp(shifted[j] - z);
      }
      (*grad)(i, 0) += inv_n;
    }
  }
  return total * inv_n;
}

// Value and (optionally) gradient of the pooled multi-label objective.
double ml_cpc_impl(const LogitMatrix& logits, double alpha, Matrix* grad) {
  const std::size_t n = logits.n();
  const std::size_t m = logits.m();
  const Weights w = log_weights(alpha, m);
  const double inv_n = 1.0 / static_cast<double>(n);

  std::vector<double> shifted(n * m);
  double positive_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = logits.row(i);
    positive_sum += row[0];
    shifted[i * m] = row[0] + w.log_pos;
    for (std::size_t j = 1; j < m; ++j) shifted[i * m + j] = row[j] + w.log_neg;
  }
  const double z = logsumexp(shifted);
  if (grad != nullptr) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) (*grad)(i, j) = -std::exp(shifted[i * m + j] - z);
      (*grad)(i, 0) += inv_n;
    }
  }
  return std::log(static_cast<double>(n) * static_cast<double>(m)) + positive_sum * inv_n - z;
}

}  // namespace

double cpc_value(const LogitMatrix& logits, double alpha) {
  return cpc_impl(logits, alpha, nullptr);
}

double ml_cpc_value(const LogitMatrix& logits, double alpha) {
  return ml_cpc_impl(logits, alpha, nullptr);
}

double objective_value(const LogitMatrix& logits, const ObjectiveSpec& spec) {
  return spec.kind == Estimator::Cpc ? cpc_value(logits, spec.alpha)
                                     : ml_cpc_value(logits, spec.alpha);
}

Matrix objective_grad_logits(const LogitMatrix& logits, const ObjectiveSpec& spec) {
  return evaluate_objective(logits, spec).grad;
}

ObjectiveResult evaluate_objective(const LogitMatrix& logits, const ObjectiveSpec& spec) {
  ObjectiveResult result;
  result.grad = Matrix(logits.n(), logits.m());
  result.value = spec.kind == Estimator::Cpc ? cpc_impl(logits, spec.alpha, &result.grad)
                                             : ml_cpc_impl(logits, spec.alpha, &result.grad);
  result.bound_valid = bound_valid(spec, logits.n(), logits.m());
  return result;
}

double schedule_alpha(const AlphaSchedule& schedule, std::size_t step) {
  if (!(schedule.alpha_start > 0.0) || !(schedule.alpha_end > 0.0)) {
    throw std::domain_error("schedule_alpha: alpha endpoints must be positive");
  }
  if (schedule.total_steps == 0) throw std::domain_error("schedule_alpha: total_steps is 0");
  if (step > schedule.total_steps) {
    throw std::domain_error("schedule_alpha: step " + std::to_string(step) +
                            " beyond total_steps " + std::to_string(schedule.total_steps));
  }
  if (step == 0) return schedule.alpha_start;
  if (step == schedule.total_steps) return schedule.alpha_end;
  const double fraction =
      static_cast<double>(step) / static_cast<double>(schedule.total_steps);
  return schedule.alpha_start *
         std::pow(schedule.alpha_end / schedule.alpha_start, fraction);
}

}  // namespace micontrast
