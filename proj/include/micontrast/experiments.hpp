#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "micontrast/critics.hpp"
#include "micontrast/objectives.hpp"
#include "micontrast/oracles.hpp"

namespace micontrast {

/// Where negatives come from: fresh draws from the known N(0, I) marginal,
/// or uniform resampling of the current batch's y rows.
enum class NegativeSource { Marginal, BatchResample };

std::string_view to_string(NegativeSource source);
NegativeSource parse_negative_source(std::string_view text);

/// Correlated-Gaussian benchmark whose true MI steps through `levels`,
/// `iters_per_level` updates each.
struct StaircaseConfig {
  std::size_t d = 20;
  std::size_t n = 128;
  std::size_t m = 128;
  std::vector<double> levels{2.0, 4.0, 6.0, 8.0, 10.0};
  std::size_t iters_per_level = 1000;
  CriticKind critic = CriticKind::Joint;
  std::vector<std::size_t> hidden{256, 256};
  std::size_t embed_dim = 32;
  ObjectiveSpec objective{};
  /// Overrides objective.alpha when set; steps are global iteration indices,
  /// clamped to total_steps.
  std::optional<AlphaSchedule> schedule;
  double lr = 1e-3;
  std::uint64_t seed = 0;
  NegativeSource negatives = NegativeSource::Marginal;
  double ema_decay = 0.99;
};

/// Throws std::invalid_argument / std::domain_error on an unusable config.
void validate(const StaircaseConfig& config);

struct TraceRecord {
  std::size_t iter = 0;
  double estimate = 0.0;
  double smoothed = 0.0;
  double true_mi = 0.0;
  double alpha = 0.0;
  double wall_ms = 0.0;
};

struct EstimateTrace {
  std::vector<TraceRecord> records;
  bool aborted = false;
  std::string diagnostic;
};

/// Trains the critic by Adam ascent on the objective, one fresh batch per
/// update, recording the pre-update batch objective as the MI estimate.
/// Deterministic in everything but wall_ms.
EstimateTrace run_staircase(const StaircaseConfig& config);

struct TrailingStats {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
};

/// Mean and standard error of the last `window` raw estimates of level
/// `level` (0-based).
TrailingStats trailing_stats(const EstimateTrace& trace, std::size_t iters_per_level,
                             std::size_t level, std::size_t window);

/// Either a fixed alpha or the smallest bound-valid alpha for the cell.
struct AlphaChoice {
  bool use_min = false;
  double value = 1.0;

  static AlphaChoice minimum() { return {true, 0.0}; }
  static AlphaChoice fixed(double v) { return {false, v}; }
  double resolve(std::size_t n, std::size_t m) const { return use_min ? alpha_min(n, m) : value; }
};

struct SweepRow {
  std::size_t n = 0;
  std::size_t m = 0;
  double alpha = 0.0;
  Estimator objective = Estimator::Cpc;
  double mean = 0.0;
  double variance = 0.0;
  double true_mi = 0.0;
  double bias = 0.0;  // true_mi - mean
  double std = 0.0;
  bool bound_valid = false;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<std::string> warnings;
};

/// Exact bias and standard deviation of both estimators on the two-point
/// world for every (size, alpha) cell. CPC cells need n == m >= 2; cells
/// that cannot be evaluated are skipped with a warning.
SweepResult run_bias_variance_sweep(double p, const std::vector<std::pair<std::size_t, std::size_t>>& sizes,
                                    const std::vector<AlphaChoice>& alphas,
                                    const BinaryWorld& critic = {});

struct TimingResult {
  double cpc_ms = 0.0;
  double mlcpc_ms = 0.0;
  std::size_t updates = 0;

  /// |cpc - mlcpc| / cpc
  double parity() const { return std::abs(cpc_ms - mlcpc_ms) / cpc_ms; }
};

/// Median per-update wall time of CPC and ML-CPC training with the same
/// critic initialisation and sample stream. Updates of the two runs are
/// interleaved; the first 10 of each are discarded. Needs updates >= 50.
TimingResult run_timing_parity(const StaircaseConfig& config, std::size_t updates);

}  // namespace micontrast
