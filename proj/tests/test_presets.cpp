#include <doctest.h>

#include <cmath>
#include <vector>

#include "gmhp/cluster_sim.hpp"
#include "gmhp/diagnostics.hpp"
#include "gmhp/presets.hpp"
#include "helpers.hpp"

using namespace gmhp;
using gmhp::testing::reference_bivariate_params;
using gmhp::testing::reference_etas_params;
using gmhp::testing::reference_finance_params;
using gmhp::testing::reference_gauss_params;

namespace {

double normal_cdf(double x, double mean, double sigma) {
  return 0.5 * (1.0 + std::erf((x - mean) / (sigma * std::sqrt(2.0))));
}

}  // namespace

TEST_SUITE("presets") {

TEST_CASE("classical builder") {
  SUBCASE("no excitation is a Poisson spec") {
    ClassicalParams params;
    params.base_rate = 1.0;
    const auto spec = build_classical(params);
    const Path history({{0.5, Mark::single(1, 0, 1.0), 0}}, 2.0, 1);
    CHECK(kappa_total(spec, 1.7, history) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(spec.notes.empty());
  }
  SUBCASE("subcritical branching ratio") {
    ClassicalParams params;
    params.base_rate = 1.0;
    params.excitation = 0.5;
    params.decay = 1.0;
    CHECK(branching_ratio(params) == doctest::Approx(0.5));
    CHECK(build_classical(params).notes.empty());
  }
  SUBCASE("supercritical parameters carry a warning note") {
    ClassicalParams params;
    params.base_rate = 1.0;
    params.excitation = 2.0;
    params.decay = 1.0;
    CHECK(branching_ratio(params) == doctest::Approx(2.0));
    const auto spec = build_classical(params);
    REQUIRE(spec.notes.size() == 1);
    CHECK(spec.notes[0].find("supercritical") != std::string::npos);
  }
  SUBCASE("nonpositive decay is a construction error") {
    ClassicalParams params;
    params.base_rate = 1.0;
    params.excitation = 0.5;
    params.decay = 0.0;
    CHECK_THROWS_AS(build_classical(params), std::invalid_argument);
  }
}

TEST_CASE("bivariate exponential builder bounds") {
  auto params = reference_bivariate_params();
  const auto spec = build_bivariate_exp(params);
  CHECK(eta_bound(spec) == doctest::Approx(1.25));
  CHECK(f_bound(spec, 1.0, Mark::single(2, 0, 1.0)) == doctest::Approx(1.0));

  SUBCASE("initial intensity above the baseline raises the bound") {
    params.initial = {0.9, 0.5, 0.25};
    const auto raised = build_bivariate_exp(params);
    CHECK(eta_bound(raised) == doctest::Approx(0.9 + 0.5 + 0.25));
    // The base rate decays from 1.65 toward 1.25 and never exceeds the bound.
    const auto report = validate_bounds(raised, 500, 10.0);
    CHECK(report.ok());
  }
  SUBCASE("initial intensity below the baseline keeps the baseline bound") {
    params.initial = {0.1, 0.5, 0.25};
    const auto raised = build_bivariate_exp(params);
    CHECK(eta_bound(raised) == doctest::Approx(1.25));
    CHECK(validate_bounds(raised, 500, 10.0).ok());
  }
}

TEST_CASE("zero impacts give three independent Poisson channels") {
  ExpParams params = reference_bivariate_params();
  params.impact = {};
  const auto spec = build_bivariate_exp(params);
  const Path history({{0.3, Mark::single(2, 0, 1.0), 0}}, 5.0, 2);
  CHECK(kappa_total(spec, 2.0, history) == doctest::Approx(1.25).epsilon(1e-12));
}

TEST_CASE("gaussian builder accepts the reference rows") {
  const auto params = reference_gauss_params();
  const auto spec = build_bivariate_gauss(params);
  CHECK(eta_bound(spec) == doctest::Approx(1.0));
  CHECK(f_bound(spec, 0.5, Mark::single(2, 0, 1.7)) == doctest::Approx(0.4));
  CHECK(f_bound(spec, 0.5, Mark::single(2, 1, -0.3)) == doctest::Approx(0.4));
  const int coords[] = {0, 1};
  const double values[] = {0.5, -0.5};
  CHECK(f_bound(spec, 0.5, Mark::touching(2, coords, values)) == doctest::Approx(0.4));
  CHECK(validate_bounds(spec, 500, 10.0).ok());
}

TEST_CASE("gaussian immigrant marks follow the base mixture") {
  BivariateGaussParams params = reference_gauss_params();
  params.impact_own = {0.0, 0.0, 0.0};
  params.impact_common = {0.0, 0.0, 0.0};
  const auto spec = build_bivariate_gauss(params);

  SimOptions options;
  options.horizon = 20000.0;
  options.seed = 616;
  RngStream stream(616);
  const auto immigrants = simulate_immigrants(spec, options, stream);
  std::vector<double> first_marks;
  for (const auto& e : immigrants) {
    const auto& cm = e.mark.coordinate(0);
    if (!cm.is_dummy()) first_marks.push_back(cm.value());
  }
  REQUIRE(first_marks.size() > 5000);

  // Coordinate 1 sees a 2:1 mixture of N(2, sigma^2) and N(0, sigma^2).
  const double sigma = params.base_sigma[0];
  auto mixture_cdf = [&](double x) {
    return (2.0 / 3.0) * normal_cdf(x, 2.0, sigma) + (1.0 / 3.0) * normal_cdf(x, 0.0, sigma);
  };
  const std::vector<double> edges = {-0.4, -0.2, -0.1, 0.0,  0.1, 0.2, 0.4, 1.0,
                                     1.6,  1.8,  1.9,  2.0,  2.1, 2.2, 2.4};
  std::vector<long long> observed(edges.size() + 1, 0);
  for (double x : first_marks) {
    std::size_t bin = 0;
    while (bin < edges.size() && x > edges[bin]) ++bin;
    ++observed[bin];
  }
  const double n = static_cast<double>(first_marks.size());
  double chi2 = 0.0;
  double prev = 0.0;
  for (std::size_t b = 0; b <= edges.size(); ++b) {
    const double cdf = b < edges.size() ? mixture_cdf(edges[b]) : 1.0;
    const double expected = n * (cdf - prev);
    prev = cdf;
    if (expected < 1e-9) {
      CHECK(observed[b] == 0);
      continue;
    }
    const double diff = static_cast<double>(observed[b]) - expected;
    chi2 += diff * diff / expected;
  }
  // 16 cells, 15 degrees of freedom: the 0.99 quantile is 30.58.
  CHECK(chi2 < 30.58);
}

TEST_CASE("zero mark scale decouples offspring marks from the parent") {
  BivariateGaussParams params = reference_gauss_params();
  params.mark_scale = {0.0, 0.0, 0.0};
  const auto spec = build_bivariate_gauss(params);
  SimOptions options;
  options.horizon = 40.0;
  RngStream root(272727);
  std::vector<double> parent_values, child_values;
  for (int r = 0; r < 3000; ++r) {
    RngStream stream = root.substream(r);
    const double value = 2.0 * stream.uniform01() - 1.0;
    const Event parent{0.5, Mark::single(2, 0, value), 0};
    const auto children = simulate_offspring(spec, parent, options, stream);
    for (const auto& c : children) {
      const auto& cm = c.mark.coordinate(0);
      if (cm.is_dummy()) continue;
      parent_values.push_back(value);
      child_values.push_back(cm.value());
    }
  }
  REQUIRE(parent_values.size() > 500);
  const double mp = gmhp::testing::mean(parent_values);
  const double mc = gmhp::testing::mean(child_values);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < parent_values.size(); ++i) {
    sxx += (parent_values[i] - mp) * (parent_values[i] - mp);
    syy += (child_values[i] - mc) * (child_values[i] - mc);
    sxy += (parent_values[i] - mp) * (child_values[i] - mc);
  }
  const double rho = sxy / std::sqrt(sxx * syy);
  CHECK(std::abs(rho) < 3.0 / std::sqrt(static_cast<double>(parent_values.size())));
}

TEST_CASE("etas construction errors") {
  EtasParams params = reference_etas_params();
  params.exponent[0][0] = 0.0;
  CHECK_THROWS_AS(build_etas(params), std::invalid_argument);
  params = reference_etas_params();
  params.offset[1][2] = -1.0;
  CHECK_THROWS_AS(build_etas(params), std::invalid_argument);
}

TEST_CASE("magnitude-independent excitation when the gain vanishes") {
  EtasParams params = reference_etas_params();
  for (auto& row : params.magnitude_gain) row = {0.0, 0.0, 0.0};
  const auto spec = build_etas(params);
  const Mark small = Mark::single(2, 0, 4.0);
  const Mark large = Mark::single(2, 0, 6.0);
  CHECK(spec.excitation->total_rate(1.5, 0.5, small) ==
        doctest::Approx(spec.excitation->total_rate(1.5, 0.5, large)).epsilon(1e-14));
}

TEST_CASE("single-location reduction matches the classical kernel") {
  EtasParams params;
  params.background = {0.8};
  params.cutoff = {4.0};
  params.magnitudes = {{5.0}};
  params.productivity = {{0.3, 0.0}};
  params.magnitude_gain = {{0.25, 0.0}};
  params.offset = {{0.5, 1.0}};
  params.exponent = {{2.0, 2.0}};
  const auto etas = build_etas(params);

  const double gain = std::exp(0.25 * (5.0 - 4.0));
  ClassicalParams classical;
  classical.base_rate = 0.8;
  classical.response_fn = [gain](double u) { return 0.3 * gain / std::pow(u + 0.5, 2.0); };
  classical.response_bound = 0.3 * gain / std::pow(0.5, 2.0);
  classical.response_integral = 0.3 * gain * std::pow(0.5, -1.0);
  const auto reduced = build_classical(classical);

  RngStream rng(1618);
  for (int probe = 0; probe < 1000; ++probe) {
    std::vector<Event> etas_events, classical_events;
    double t = 0.0;
    const int n_events = static_cast<int>(rng.uniform01() * 4.0);
    for (int k = 0; k < n_events; ++k) {
      t += 0.05 + rng.uniform01();
      etas_events.push_back({t, Mark::single(1, 0, 5.0), 0});
      classical_events.push_back({t, Mark::single(1, 0, 1.0), 0});
    }
    const double horizon = t + 2.0;
    const Path etas_path(std::move(etas_events), horizon, 1);
    const Path classical_path(std::move(classical_events), horizon, 1);
    const double probe_t = t + 0.1 + rng.uniform01();
    CHECK(kappa_total(etas, probe_t, etas_path) ==
          doctest::Approx(kappa_total(reduced, probe_t, classical_path)).epsilon(1e-12));
  }
}

TEST_CASE("single-location total counts match the classical preset") {
  EtasParams params;
  params.background = {0.8};
  params.cutoff = {4.0};
  params.magnitudes = {{5.0}};
  params.productivity = {{0.3, 0.0}};
  params.magnitude_gain = {{0.0, 0.0}};
  params.offset = {{0.5, 1.0}};
  params.exponent = {{2.0, 2.0}};
  const auto etas = build_etas(params);

  ClassicalParams classical;
  classical.base_rate = 0.8;
  classical.response_fn = [](double u) { return 0.3 / std::pow(u + 0.5, 2.0); };
  classical.response_bound = 0.3 / 0.25;
  classical.response_integral = 0.3 * 2.0;
  const auto reduced = build_classical(classical);

  SimOptions options;
  options.horizon = 10.0;
  options.max_generation = 40;
  const int runs = 3000;
  std::vector<double> etas_counts, classical_counts;
  for (int r = 0; r < runs; ++r) {
    options.seed = derive_path_seed(41, r);
    etas_counts.push_back(static_cast<double>(simulate(etas, options).size()));
    options.seed = derive_path_seed(42, r);
    classical_counts.push_back(static_cast<double>(simulate(reduced, options).size()));
  }
  const double gap =
      gmhp::testing::mean(etas_counts) - gmhp::testing::mean(classical_counts);
  const double se = std::hypot(gmhp::testing::standard_error(etas_counts),
                               gmhp::testing::standard_error(classical_counts));
  CHECK(std::abs(gap) < 3.0 * se);
}

TEST_CASE("finance price difference behaves like independent streams") {
  FinanceCojumpParams params;
  params.n_assets = 1;
  params.marks = {{{0}, 0.5}, {{1}, 0.5}};
  params.impact.assign(2, std::vector<double>(2, 0.0));
  params.decay.assign(2, std::vector<double>(2, 1.0));
  const auto spec = build_finance_cojump(params);

  SimOptions options;
  options.horizon = 10.0;
  const int runs = 4000;
  std::vector<double> finals;
  for (int r = 0; r < runs; ++r) {
    options.seed = derive_path_seed(5150, r);
    const auto path = simulate(spec, options);
    const auto prices = price_paths(path, 1);
    long long last = prices[0].empty() ? 0 : prices[0].back().second;
    finals.push_back(static_cast<double>(last));
    if (r < 50) {
      long long previous = 0;
      for (const auto& [t, level] : prices[0]) {
        CHECK(std::abs(level - previous) == 1);
        previous = level;
      }
    }
  }
  const double m = gmhp::testing::mean(finals);
  const double se = gmhp::testing::standard_error(finals);
  CHECK(std::abs(m) < 3.0 * se);
  // Var of the difference of two Poisson(mu T) streams is 2 mu T.
  double ss = 0.0;
  for (double x : finals) ss += (x - m) * (x - m);
  const double variance = ss / (runs - 1);
  const double target = 2.0 * 0.5 * options.horizon;
  CHECK(variance == doctest::Approx(target).epsilon(0.1));
}

TEST_CASE("common-only finance marks move both prices together") {
  FinanceCojumpParams params;
  params.n_assets = 2;
  params.marks = {{{0, 2}, 0.7}};
  params.impact.assign(1, std::vector<double>(1, 0.2));
  params.decay.assign(1, std::vector<double>(1, 2.0));
  const auto spec = build_finance_cojump(params);

  SimOptions options;
  options.horizon = 10.0;
  options.seed = 10101;
  const auto path = simulate(spec, options);
  const auto counts = count_decomposition(path, options.horizon);
  CHECK(counts.common == static_cast<long long>(path.size()));
  const auto prices = price_paths(path, 2);
  REQUIRE(prices[0].size() == path.size());
  REQUIRE(prices[1].size() == path.size());
  for (std::size_t k = 0; k < path.size(); ++k) {
    CHECK(prices[0][k].second == prices[1][k].second);
  }
}

TEST_CASE("every reference preset passes bound validation") {
  CHECK(validate_bounds(build_bivariate_exp(reference_bivariate_params()), 1000, 10.0).ok());
  CHECK(validate_bounds(build_bivariate_gauss(reference_gauss_params()), 1000, 10.0).ok());
  CHECK(validate_bounds(build_etas(reference_etas_params()), 1000, 10.0).ok());
  CHECK(validate_bounds(build_finance_cojump(reference_finance_params()), 1000, 10.0).ok());
  ClassicalParams classical;
  classical.base_rate = 1.0;
  classical.excitation = 0.5;
  classical.decay = 1.0;
  CHECK(validate_bounds(build_classical(classical), 1000, 10.0).ok());
}

}  // TEST_SUITE
