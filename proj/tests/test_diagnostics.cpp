#include <doctest.h>

#include <cmath>

#include "gmhp/cluster_sim.hpp"
#include "gmhp/diagnostics.hpp"
#include "gmhp/presets.hpp"
#include "helpers.hpp"

using namespace gmhp;
using gmhp::testing::reference_bivariate_params;

namespace {

KernelSpec poisson_spec(double rate) {
  ClassicalParams params;
  params.base_rate = rate;
  return build_classical(params);
}

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("compensator of a constant rate is linear") {
  const auto spec = poisson_spec(0.7);
  const Path path({{0.5, Mark::single(1, 0, 1.0), 0}}, 4.0, 1);
  CHECK(compensator(spec, path, 0.0) == 0.0);
  CHECK(compensator(spec, path, 3.0) == doctest::Approx(2.1).epsilon(1e-12));
  CHECK_THROWS_AS(compensator(spec, path, 4.5), std::invalid_argument);
}

TEST_CASE("compensator of the reference model after one event") {
  const auto spec = build_bivariate_exp(reference_bivariate_params());
  const Path path({{0.4, Mark::single(2, 0, 1.0), 0}}, 2.0, 2);
  // Base part 1.25 * t; the event adds, per response row,
  // theta * (1 - exp(-beta * (t - 0.4))) / beta.
  const double expected = 1.25 + 0.3 * (1.0 - std::exp(-1.5)) +
                          0.05 * (1.0 - std::exp(-3.0));
  CHECK(expected == doctest::Approx(1.5305715985370778).epsilon(1e-15));
  CHECK(compensator(spec, path, 1.0) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(compensator(spec, path, 1.0, std::nullopt, IntegrationMode::Quadrature) ==
        doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("closed form and quadrature agree on random probes") {
  const auto spec = build_bivariate_exp(reference_bivariate_params());
  SimOptions options;
  options.horizon = 5.0;
  options.max_generation = 25;
  RngStream rng(314);
  for (int probe = 0; probe < 100; ++probe) {
    options.seed = derive_path_seed(314, probe);
    const auto path = simulate(spec, options);
    const double t = rng.uniform01() * 5.0;
    const double closed = compensator(spec, path, t, std::nullopt,
                                      IntegrationMode::ClosedForm);
    const double numeric = compensator(spec, path, t, std::nullopt,
                                       IntegrationMode::Quadrature);
    CHECK(numeric == doctest::Approx(closed).epsilon(1e-8));
    const double closed1 = compensator(spec, path, t, 0, IntegrationMode::ClosedForm);
    const double numeric1 = compensator(spec, path, t, 0, IntegrationMode::Quadrature);
    CHECK(numeric1 == doctest::Approx(closed1).epsilon(1e-8));
  }
}

TEST_CASE("compensator is nondecreasing in time") {
  const auto spec = build_bivariate_exp(reference_bivariate_params());
  SimOptions options;
  options.horizon = 5.0;
  options.seed = 808;
  options.max_generation = 25;
  const auto path = simulate(spec, options);
  double previous = 0.0;
  for (double t = 0.0; t <= 5.0; t += 0.25) {
    const double value = compensator(spec, path, t);
    CHECK(value >= previous - 1e-12);
    previous = value;
  }
}

TEST_CASE("time rescaling of a homogeneous stream is a linear rescale") {
  const auto spec = poisson_spec(2.0);
  const Path path({{0.5, Mark::single(1, 0, 1.0), 0},
                   {1.25, Mark::single(1, 0, 1.0), 0},
                   {3.0, Mark::single(1, 0, 1.0), 0}},
                  4.0, 1);
  const auto series = time_rescale(spec, path, 0);
  REQUIRE(series.values.size() == 3);
  CHECK(series.values[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(series.values[1] == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(series.values[2] == doctest::Approx(3.5).epsilon(1e-12));
}

TEST_CASE("time rescaling of an empty coordinate is empty") {
  const auto spec = build_bivariate_exp(reference_bivariate_params());
  const Path path({{0.4, Mark::single(2, 0, 1.0), 0}}, 2.0, 2);
  CHECK(time_rescale(spec, path, 1).values.empty());
}

TEST_CASE("pooled residuals of the generating kernel look unit exponential") {
  const auto spec = build_bivariate_exp(reference_bivariate_params());
  SimOptions options;
  options.horizon = 5.0;
  options.max_generation = 25;
  options.seed = 11;
  const auto paths = simulate_batch(spec, options, 500, 2);
  const auto pooled = pooled_rescaled_gaps(spec, paths, 0);
  REQUIRE(pooled.size() > 1500);
  const auto ks = ks_exp1(pooled);
  CHECK(ks.p_value >= 0.01);
  const double rel = 5.0 * gmhp::testing::standard_error(pooled);
  CHECK(gmhp::testing::mean(pooled) == doctest::Approx(1.0).epsilon(rel));

  // Per-path series alone carry the window bias; the pooled seams remove it.
  std::vector<double> within;
  for (const auto& p : paths) {
    const auto series = time_rescale(spec, p, 0);
    within.insert(within.end(), series.values.begin(), series.values.end());
  }
  CHECK(gmhp::testing::mean(within) < gmhp::testing::mean(pooled));
}

TEST_CASE("ks_exp1") {
  SUBCASE("exponential quantiles give a tiny statistic") {
    std::vector<double> values;
    const int n = 99;
    for (int i = 1; i <= n; ++i)
      values.push_back(-std::log(1.0 - static_cast<double>(i) / (n + 1)));
    const auto ks = ks_exp1(values);
    CHECK(ks.statistic <= 0.02);
    CHECK(ks.p_value > 0.5);
  }
  SUBCASE("single point at the exponential median") {
    const auto ks = ks_exp1({std::log(2.0)});
    CHECK(ks.statistic == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("degenerate sample is rejected hard") {
    std::vector<double> values(300, 0.0001);
    const auto ks = ks_exp1(values);
    CHECK(ks.statistic > 0.99);
    CHECK(ks.p_value < 1e-6);
  }
  SUBCASE("empty input is a usage error") {
    CHECK_THROWS_AS(ks_exp1({}), std::invalid_argument);
  }
}

TEST_CASE("mean count report of a Poisson stream") {
  const auto spec = poisson_spec(1.5);
  const double horizon = 10.0;
  const auto report = mean_count_report(spec, 4000, horizon, 21);
  const auto& stats = report.coordinate_counts[0];
  CHECK(std::abs(stats.mean - 15.0) < 3.0 * stats.se_mean);
  CHECK(std::abs(report.compensator_gap_se_units[0]) < 3.0);
}

TEST_CASE("mean count report matches the expected-intensity solution") {
  const ExpParams params = reference_bivariate_params();
  const auto solution = gmhp::testing::expected_counts_ode(params, 5.0);
  CHECK(solution.expected_count1 == doctest::Approx(5.342672838868664).epsilon(1e-9));

  const auto spec = build_bivariate_exp(params);
  const auto report = mean_count_report(spec, 6000, 5.0, 33, 25, 2);
  const auto& stats = report.coordinate_counts[0];
  CHECK(std::abs(stats.mean - solution.expected_count1) < 3.0 * stats.se_mean);
  CHECK(std::abs(report.compensator_gap_se_units[0]) < 3.0);
  CHECK(std::abs(report.compensator_gap_se_units[1]) < 3.0);
}

TEST_CASE("two paths produce a report without failing") {
  const auto spec = poisson_spec(1.0);
  const auto report = mean_count_report(spec, 2, 5.0, 1);
  CHECK(report.n_paths == 2);
  CHECK(report.coordinate_counts[0].se_mean >= 0.0);
  CHECK_THROWS_AS(mean_count_report(spec, 1, 5.0, 1), std::invalid_argument);
}

}  // TEST_SUITE
