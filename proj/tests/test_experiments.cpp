#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "micontrast/experiments.hpp"

using namespace micontrast;

namespace {

StaircaseConfig small_config(Estimator kind, double alpha) {
  StaircaseConfig c;
  c.d = 10;
  c.n = 16;
  c.m = 16;
  c.levels = {0.0};
  c.iters_per_level = 600;
  c.hidden = {64};
  c.embed_dim = 16;
  c.objective = {kind, alpha};
  c.seed = 7;
  return c;
}

}  // namespace

TEST_CASE("staircase on independent data stays near zero") {
  for (Estimator kind : {Estimator::Cpc, Estimator::MlCpc}) {
    CAPTURE(to_string(kind));
    const auto trace = run_staircase(small_config(kind, 1.0));
    REQUIRE_FALSE(trace.aborted);
    REQUIRE(trace.records.size() == 600);
    const auto stats = trailing_stats(trace, 600, 0, 200);
    CHECK(std::abs(stats.mean) <= 0.05);
    CHECK(trace.records.front().true_mi == 0.0);
  }
}

TEST_CASE("CPC estimates never exceed ln m") {
  auto config = small_config(Estimator::Cpc, 1.0);
  config.levels = {2.0, 6.0};
  config.iters_per_level = 400;
  const auto trace = run_staircase(config);
  REQUIRE_FALSE(trace.aborted);
  for (const auto& r : trace.records) {
    CHECK(r.estimate <= std::log(16.0) + 1e-9);
    CHECK(r.smoothed <= std::log(16.0) + 1e-9);
  }
  CHECK(trailing_stats(trace, 400, 1, 200).mean <= std::log(16.0) + 0.02);
}

TEST_CASE("ML-CPC with the smallest valid alpha passes ln m") {
  auto config = small_config(Estimator::MlCpc, alpha_min(16, 16));
  config.levels = {6.0};
  config.iters_per_level = 1500;
  config.hidden = {128, 128};
  const auto trace = run_staircase(config);
  REQUIRE_FALSE(trace.aborted);
  const auto stats = trailing_stats(trace, 1500, 0, 200);
  CHECK(stats.mean > std::log(16.0));
  CHECK(stats.mean <= 6.0 + 3.0 * stats.std_error);
}

TEST_CASE("staircase is deterministic apart from wall time") {
  for (NegativeSource source : {NegativeSource::Marginal, NegativeSource::BatchResample}) {
    for (CriticKind critic : {CriticKind::Joint, CriticKind::Separable}) {
      CAPTURE(to_string(source));
      CAPTURE(to_string(critic));
      auto config = small_config(Estimator::MlCpc, 0.5);
      config.iters_per_level = 30;
      config.levels = {1.0, 2.0};
      config.negatives = source;
      config.critic = critic;
      const auto a = run_staircase(config);
      const auto b = run_staircase(config);
      REQUIRE(a.records.size() == b.records.size());
      for (std::size_t k = 0; k < a.records.size(); ++k) {
        CAPTURE(k);
        CHECK(a.records[k].estimate == b.records[k].estimate);
        CHECK(a.records[k].smoothed == b.records[k].smoothed);
        CHECK(a.records[k].alpha == b.records[k].alpha);
        CHECK(a.records[k].iter == k);
      }
      config.seed = 8;
      CHECK(run_staircase(config).records.back().estimate != a.records.back().estimate);
    }
  }
}

TEST_CASE("trace bookkeeping") {
  auto config = small_config(Estimator::MlCpc, 1.0);
  config.levels = {1.0, 3.0};
  config.iters_per_level = 20;
  config.schedule = AlphaSchedule{2.0, 0.5, 40};
  const auto trace = run_staircase(config);
  REQUIRE(trace.records.size() == 40);
  CHECK(trace.records[0].alpha == 2.0);
  CHECK(trace.records[20].alpha == 1.0);
  CHECK(trace.records[5].true_mi == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(trace.records[25].true_mi == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(trace.records[0].smoothed == trace.records[0].estimate);
  const double expected = 0.99 * trace.records[0].smoothed + 0.01 * trace.records[1].estimate;
  CHECK(trace.records[1].smoothed == doctest::Approx(expected).epsilon(1e-15));
  for (const auto& r : trace.records) CHECK(r.wall_ms >= 0.0);

  CHECK_THROWS_AS(trailing_stats(trace, 20, 2, 10), std::out_of_range);
  CHECK_THROWS_AS(trailing_stats(trace, 20, 0, 21), std::out_of_range);
  const auto stats = trailing_stats(trace, 20, 1, 5);
  CHECK(stats.count == 5);
  CHECK(stats.std_error > 0.0);
}

TEST_CASE("staircase validation") {
  auto bad = small_config(Estimator::Cpc, 1.0);
  bad.m = 1;
  CHECK_THROWS_AS(run_staircase(bad), std::invalid_argument);
  bad = small_config(Estimator::Cpc, 1.0);
  bad.levels = {4.0, 2.0};
  CHECK_THROWS_AS(run_staircase(bad), std::invalid_argument);
  bad = small_config(Estimator::Cpc, 1.0);
  bad.levels = {};
  CHECK_THROWS_AS(run_staircase(bad), std::invalid_argument);
  bad = small_config(Estimator::Cpc, 16.0);
  CHECK_THROWS_AS(run_staircase(bad), std::domain_error);
  bad = small_config(Estimator::Cpc, 1.0);
  bad.lr = 0.0;
  CHECK_THROWS_AS(run_staircase(bad), std::invalid_argument);
  CHECK(parse_negative_source("batch") == NegativeSource::BatchResample);
  CHECK_THROWS_AS(parse_negative_source("queue"), std::invalid_argument);
}

TEST_CASE("bias-variance sweep") {
  SUBCASE("small-batch CPC bias") {
    const auto result = run_bias_variance_sweep(0.5, {{3, 3}}, {AlphaChoice::fixed(1.0)});
    REQUIRE(result.rows.size() == 2);
    const auto& cpc = result.rows[0];
    CHECK(cpc.objective == Estimator::Cpc);
    CHECK(cpc.bias == doctest::Approx(0.2157).epsilon(1e-3));
    CHECK(cpc.std == doctest::Approx(std::sqrt(cpc.variance)));
    CHECK(cpc.bound_valid);
    CHECK(result.rows[1].objective == Estimator::MlCpc);
  }

  SUBCASE("degenerate worlds have zero bias") {
    for (double p : {0.0, 1.0}) {
      const auto result = run_bias_variance_sweep(p, {{3, 3}, {4, 4}},
                                                  {AlphaChoice::fixed(1.0), AlphaChoice::minimum()});
      for (const auto& row : result.rows) {
        CHECK(std::abs(row.bias) <= 1e-12);
        CHECK(row.std <= 1e-9);
      }
    }
  }

  SUBCASE("bias falls with batch size") {
    const auto result =
        run_bias_variance_sweep(0.5, {{3, 3}, {5, 5}, {9, 9}, {17, 17}}, {AlphaChoice::fixed(1.0)});
    REQUIRE(result.rows.size() == 8);
    for (Estimator kind : {Estimator::Cpc, Estimator::MlCpc}) {
      double prev = 1e9;
      for (const auto& row : result.rows) {
        if (row.objective != kind) continue;
        CHECK(row.bias < prev);
        prev = row.bias;
      }
    }
  }

  SUBCASE("alpha_min lowers bias and raises variance for ML-CPC") {
    const auto result = run_bias_variance_sweep(
        0.5, {{5, 5}}, {AlphaChoice::minimum(), AlphaChoice::fixed(1.0)});
    const SweepRow* low = nullptr;
    const SweepRow* one = nullptr;
    for (const auto& row : result.rows) {
      if (row.objective != Estimator::MlCpc) continue;
      (row.alpha < 1.0 ? low : one) = &row;
    }
    REQUIRE(low);
    REQUIRE(one);
    CHECK(low->alpha == doctest::Approx(5.0 / 21.0));
    CHECK(low->bias < one->bias);
    CHECK(low->bias >= -1e-9);
    CHECK(low->std > one->std);
  }

  SUBCASE("cells that cannot be evaluated become warnings") {
    const auto result = run_bias_variance_sweep(0.5, {{2, 4}}, {AlphaChoice::fixed(1.0)});
    CHECK(result.rows.size() == 1);
    CHECK(result.warnings.size() == 1);
    const auto high = run_bias_variance_sweep(0.5, {{3, 3}}, {AlphaChoice::fixed(5.0)});
    CHECK(high.rows.empty());
    CHECK(high.warnings.size() == 2);
    CHECK_THROWS_AS(run_bias_variance_sweep(0.5, {}, {AlphaChoice::fixed(1.0)}),
                    std::invalid_argument);
    CHECK_THROWS_AS(run_bias_variance_sweep(0.5, {{3, 3}}, {}), std::invalid_argument);
    CHECK_THROWS_AS(run_bias_variance_sweep(1.5, {{3, 3}}, {AlphaChoice::fixed(1.0)}),
                    std::domain_error);
  }
}

TEST_CASE("timing parity runs both trainers") {
  auto config = small_config(Estimator::Cpc, 1.0);
  config.levels = {2.0};
  const auto timing = run_timing_parity(config, 60);
  CHECK(timing.updates == 60);
  CHECK(timing.cpc_ms > 0.0);
  CHECK(timing.mlcpc_ms > 0.0);
  CHECK(timing.parity() >= 0.0);
  CHECK_THROWS_AS(run_timing_parity(config, 10), std::invalid_argument);
}
