#include "micontrast/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

namespace micontrast {

std::string_view to_string(NegativeSource source) {
  return source == NegativeSource::Marginal ? "marginal" : "batch";
}

NegativeSource parse_negative_source(std::string_view text) {
  if (text == "marginal") return NegativeSource::Marginal;
  if (text == "batch") return NegativeSource::BatchResample;
  throw std::invalid_argument("unknown negative source '" + std::string(text) + "'");
}

void validate(const StaircaseConfig& config) {
  if (config.d == 0) throw std::invalid_argument("staircase: d must be >= 1");
  if (config.n == 0) throw std::invalid_argument("staircase: n must be >= 1");
  if (config.m < 2) throw std::invalid_argument("staircase: m must be >= 2");
  if (config.levels.empty()) throw std::invalid_argument("staircase: no MI levels");
  if (config.iters_per_level == 0) throw std::invalid_argument("staircase: iters must be >= 1");
  for (std::size_t k = 0; k < config.levels.size(); ++k) {
    if (!(config.levels[k] >= 0.0) || !std::isfinite(config.levels[k])) {
      throw std::invalid_argument("staircase: MI levels must be finite and >= 0");
    }
    if (k > 0 && !(config.levels[k] > config.levels[k - 1])) {
      throw std::invalid_argument("staircase: MI levels must be strictly increasing");
    }
    const double rho = rho_for_mi(config.d, config.levels[k]);
    if (!(rho < 1.0)) throw std::invalid_argument("staircase: MI level too large for d");
  }
  const double md = static_cast<double>(config.m);
  auto check_alpha = [&](double a) {
    if (!(a > 0.0 && a < md)) throw std::domain_error("staircase: alpha must satisfy 0 < alpha < m");
  };
  if (config.schedule) {
    check_alpha(config.schedule->alpha_start);
    check_alpha(config.schedule->alpha_end);
    if (config.schedule->total_steps == 0) {
      throw std::invalid_argument("staircase: schedule needs total_steps >= 1");
    }
  } else {
    check_alpha(config.objective.alpha);
  }
  if (!(config.lr > 0.0)) throw std::invalid_argument("staircase: lr must be positive");
  if (!(config.ema_decay >= 0.0 && config.ema_decay < 1.0)) {
    throw std::invalid_argument("staircase: ema_decay must lie in [0, 1)");
  }
  if (config.critic == CriticKind::Separable && config.embed_dim == 0) {
    throw std::invalid_argument("staircase: embed_dim must be >= 1");
  }
  for (auto w : config.hidden) {
    if (w == 0) throw std::invalid_argument("staircase: hidden widths must be >= 1");
  }
}

namespace {

using Clock = std::chrono::steady_clock;

// Data stream seed, decorrelated from the initialisation stream.
std::uint64_t data_seed(std::uint64_t seed) { return seed ^ 0xd1b54a32d192ed03ULL; }

bool all_finite(const CriticParams& params) {
  for (auto block : parameter_blocks(params)) {
    for (double v : block) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

// One critic trained on one objective.
class Trainer {
 public:
  explicit Trainer(const StaircaseConfig& config)
      : config_(config),
        model_(make_model(config)),
        data_rng_(data_seed(config.seed)) {
    adam_.lr = config.lr;
  }

  struct Step {
    double value = 0.0;
    double alpha = 0.0;
    bool ok = true;
    std::string diagnostic;
  };

  Step step(double rho, std::size_t global_iter) {
    Step out;
    out.alpha = config_.schedule
                    ? schedule_alpha(*config_.schedule,
                                     std::min(global_iter, config_.schedule->total_steps))
                    : config_.objective.alpha;
    auto [x, y] = sample_correlated_gaussian(data_rng_, config_.d, rho, config_.n);
    Matrix negatives;
    if (config_.negatives == NegativeSource::Marginal) {
      negatives = Matrix(config_.n * (config_.m - 1), config_.d);
      fill_standard_normal(data_rng_, negatives);
    } else {
      negatives = marginal_shuffle(data_rng_, y, config_.m - 1);
    }

    std::optional<LogitMatrix> logits;
    try {
      logits.emplace(model_.logits(x, y, negatives, &cache_));
    } catch (const std::invalid_argument& e) {
      out.ok = false;
      out.diagnostic = std::string("non-finite critic output: ") + e.what();
      return out;
    }
    const ObjectiveResult result =
        evaluate_objective(*logits, ObjectiveSpec{config_.objective.kind, out.alpha});
    out.value = result.value;
    if (!std::isfinite(result.value)) {
      out.ok = false;
      out.diagnostic = "non-finite objective value";
      return out;
    }
    // Ascent on the objective is descent on its negation.
    Matrix descent = result.grad;
    for (double& g : descent.values()) g = -g;
    const CriticParams grads = model_.backward(cache_, descent);
    adam_step(model_, grads, adam_);
    if (!all_finite(model_.params())) {
      out.ok = false;
      out.diagnostic = "non-finite critic parameters after update";
    }
    return out;
  }

 private:
  static CriticModel make_model(const StaircaseConfig& config) {
    CriticConfig critic;
    critic.kind = config.critic;
    critic.input_dim = config.d;
    critic.hidden = config.hidden;
    critic.embed_dim = config.embed_dim;
    Rng init_rng(config.seed);
    return CriticModel(critic, init_rng);
  }

  StaircaseConfig config_;
  CriticModel model_;
  Rng data_rng_;
  AdamState adam_;
  ForwardCache cache_;
};

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

EstimateTrace run_staircase(const StaircaseConfig& config) {
  validate(config);
  EstimateTrace trace;
  trace.records.reserve(config.levels.size() * config.iters_per_level);
  Trainer trainer(config);
  double smoothed = 0.0;
  std::size_t iter = 0;
  for (double level : config.levels) {
    const double rho = rho_for_mi(config.d, level);
    const double true_mi = gaussian_true_mi(config.d, rho);
    for (std::size_t k = 0; k < config.iters_per_level; ++k, ++iter) {
      const auto start = Clock::now();
      const auto step = trainer.step(rho, iter);
      const double wall = elapsed_ms(start);
      if (!step.ok) {
        trace.aborted = true;
        trace.diagnostic = "iteration " + std::to_string(iter) + ": " + step.diagnostic;
        return trace;
      }
      smoothed = iter == 0 ? step.value
                           : config.ema_decay * smoothed + (1.0 - config.ema_decay) * step.value;
      trace.records.push_back({iter, step.value, smoothed, true_mi, step.alpha, wall});
    }
  }
  return trace;
}

TrailingStats trailing_stats(const EstimateTrace& trace, std::size_t iters_per_level,
                             std::size_t level, std::size_t window) {
  const std::size_t end = (level + 1) * iters_per_level;
  if (iters_per_level == 0 || window == 0 || window > iters_per_level ||
      end > trace.records.size()) {
    throw std::out_of_range("trailing_stats: window outside the recorded trace");
  }
  TrailingStats stats;
  stats.count = window;
  for (std::size_t k = end - window; k < end; ++k) stats.mean += trace.records[k].estimate;
  stats.mean /= static_cast<double>(window);
  if (window > 1) {
    double ss = 0.0;
    for (std::size_t k = end - window; k < end; ++k) {
      const double diff = trace.records[k].estimate - stats.mean;
      ss += diff * diff;
    }
    const double variance = ss / static_cast<double>(window - 1);
    stats.std_error = std::sqrt(variance / static_cast<double>(window));
  }
  return stats;
}

SweepResult run_bias_variance_sweep(double p,
                                    const std::vector<std::pair<std::size_t, std::size_t>>& sizes,
                                    const std::vector<AlphaChoice>& alphas,
                                    const BinaryWorld& critic) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("sweep: p must lie in [0, 1]");
  if (sizes.empty()) throw std::invalid_argument("sweep: no sizes");
  if (alphas.empty()) throw std::invalid_argument("sweep: no alpha values");
  BinaryWorld world = critic;
  world.p = p;
  const double true_mi = binary_true_mi(p);

  SweepResult result;
  for (const auto& [n, m] : sizes) {
    for (const auto& choice : alphas) {
      double alpha = 0.0;
      try {
        alpha = choice.resolve(n, m);
      } catch (const std::domain_error& e) {
        result.warnings.push_back("n=" + std::to_string(n) + " m=" + std::to_string(m) +
                                  ": " + e.what());
        continue;
      }
      for (Estimator kind : {Estimator::Cpc, Estimator::MlCpc}) {
        const std::string cell = "n=" + std::to_string(n) + " m=" + std::to_string(m) +
                                 " alpha=" + std::to_string(alpha) + " " +
                                 std::string(to_string(kind));
        if (kind == Estimator::Cpc && n != m) {
          result.warnings.push_back(cell + ": CPC oracle needs n == m, skipped");
          continue;
        }
        try {
          const OracleStats stats = kind == Estimator::Cpc
                                        ? binary_cpc_oracle(world, n, alpha)
                                        : binary_mlcpc_oracle(world, n, m, alpha);
          SweepRow row;
          row.n = n;
          row.m = m;
          row.alpha = alpha;
          row.objective = kind;
          row.mean = stats.mean;
          row.variance = stats.variance;
          row.true_mi = true_mi;
          row.bias = true_mi - stats.mean;
          row.std = std::sqrt(stats.variance);
          row.bound_valid = bound_valid(ObjectiveSpec{kind, alpha}, n, m);
          result.rows.push_back(row);
        } catch (const std::domain_error& e) {
          result.warnings.push_back(cell + ": " + e.what() + ", skipped");
        }
      }
    }
  }
  return result;
}

TimingResult run_timing_parity(const StaircaseConfig& config, std::size_t updates) {
  validate(config);
  if (updates < 50) throw std::invalid_argument("timing parity: need at least 50 updates");
  constexpr std::size_t kWarmup = 10;

  StaircaseConfig cpc = config;
  cpc.objective.kind = Estimator::Cpc;
  StaircaseConfig mlcpc = config;
  mlcpc.objective.kind = Estimator::MlCpc;
  Trainer cpc_trainer(cpc);
  Trainer mlcpc_trainer(mlcpc);

  const double rho = rho_for_mi(config.d, config.levels.front());
  std::vector<double> cpc_ms;
  std::vector<double> mlcpc_ms;
  for (std::size_t k = 0; k < updates; ++k) {
    auto start = Clock::now();
    const auto a = cpc_trainer.step(rho, k);
    const double t_cpc = elapsed_ms(start);
    start = Clock::now();
    const auto b = mlcpc_trainer.step(rho, k);
    const double t_mlcpc = elapsed_ms(start);
    if (!a.ok || !b.ok) {
      throw std::runtime_error("timing parity: training diverged: " + a.diagnostic + b.diagnostic);
    }
    if (k >= kWarmup) {
      cpc_ms.push_back(t_cpc);
      mlcpc_ms.push_back(t_mlcpc);
    }
  }
  auto median = [](std::vector<double> v) {
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (v.size() % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(v.begin(), mid);
    return 0.5 * (lower + upper);
  };
  return {median(cpc_ms), median(mlcpc_ms), updates};
}

}  // namespace micontrast
