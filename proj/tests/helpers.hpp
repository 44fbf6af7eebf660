#ifndef GMHP_TESTS_HELPERS_HPP
#define GMHP_TESTS_HELPERS_HPP

#include <array>
#include <cmath>
#include <vector>

#include "gmhp/markov_exp.hpp"
#include "gmhp/presets.hpp"

namespace gmhp::testing {

// Symmetric bivariate reference model used across the suites:
//   baselines (0.5, 0.5, 0.25), decays (2.5, 2.5, 5.0), initial = baseline,
//   impact matrix rows (0.5, 0.25, 0.25 / 0.25, 0.5, 0.25 / 0.25, 0.25, 0.25).
inline ExpParams reference_bivariate_params() {
  ExpParams p;
  p.baseline = {0.5, 0.5, 0.25};
  p.decay = {2.5, 2.5, 5.0};
  p.initial = p.baseline;
  p.impact = {{{0.5, 0.25, 0.25}, {0.25, 0.5, 0.25}, {0.25, 0.25, 0.25}}};
  return p;
}

// Gaussian-mark reference model (first/second/common rows).
inline BivariateGaussParams reference_gauss_params() {
  BivariateGaussParams p;
  p.base_rate = {0.4, 0.4, 0.2};
  p.base_mean = {2.0, -2.0, 0.0};
  p.base_sigma = {0.16331, 0.16331, 0.16331};
  p.decay = {0.41175, 0.41175, 0.81175};
  p.mark_scale = {0.9, 0.9, 1.1};
  p.impact_own = {0.3, 0.3, 0.4};
  p.impact_common = {0.1, 0.1, 0.4};
  return p;
}

inline EtasParams reference_etas_params() {
  EtasParams p;
  p.background = {0.2, 0.15};
  p.cutoff = {4.0, 4.0};
  p.magnitudes = {{4.0, 4.5, 5.0, 5.5, 6.0}, {4.0, 4.5, 5.0, 5.5, 6.0}};
  p.productivity = {{0.15, 0.05, 0.04}, {0.05, 0.15, 0.04}};
  p.magnitude_gain = {{0.4, 0.3, 0.3}, {0.3, 0.4, 0.3}};
  p.offset = {{0.2, 0.2, 0.2}, {0.2, 0.2, 0.2}};
  p.exponent = {{1.3, 1.3, 1.3}, {1.3, 1.3, 1.3}};
  return p;
}

inline FinanceCojumpParams reference_finance_params() {
  FinanceCojumpParams p;
  p.n_assets = 2;
  p.marks = {
      {{0}, 0.5},     // asset 1 up
      {{1}, 0.5},     // asset 1 down
      {{2}, 0.5},     // asset 2 up
      {{3}, 0.5},     // asset 2 down
      {{0, 2}, 0.1},  // joint upward move
  };
  const std::size_t n = p.marks.size();
  p.impact.assign(n, std::vector<double>(n, 0.05));
  for (std::size_t i = 0; i < n; ++i) p.impact[i][i] = 0.2;
  p.decay.assign(n, std::vector<double>(n, 1.5));
  return p;
}

// Stationary mean intensities of the reference model: the solution of
// decay_i (baseline_i - m_i) + sum_j impact[i][j] m_j = 0, by elimination.
inline std::array<double, 3> solve_stationary_intensity(const ExpParams& p) {
  // Build A m = b with A = diag(decay) - impact, b = decay * baseline.
  std::array<std::array<double, 4>, 3> a{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) a[i][j] = (i == j ? p.decay[i] : 0.0) - p.impact[i][j];
    a[i][3] = p.decay[i] * p.baseline[i];
  }
  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 3; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    std::swap(a[pivot], a[col]);
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const double factor = a[r][col] / a[col][col];
      for (int c = col; c < 4; ++c) a[r][c] -= factor * a[col][c];
    }
  }
  return {a[0][3] / a[0][0], a[1][3] / a[1][1], a[2][3] / a[2][2]};
}

// Expected intensities m(t) of the reference model solve the linear system
// m' = decay * (baseline - m) + impact m; fourth-order Runge-Kutta, with the
// integral of (m_1 + m_c) accumulated alongside (= expected count of the
// first coordinate).
struct ExpectedCountSolution {
  std::array<double, 3> intensity{};
  double expected_count1 = 0.0;
};

inline ExpectedCountSolution expected_counts_ode(const ExpParams& p, double horizon,
                                                 double step = 1e-4) {
  auto rhs = [&p](const std::array<double, 3>& m) {
    std::array<double, 3> out{};
    for (int i = 0; i < 3; ++i) {
      out[i] = p.decay[i] * (p.baseline[i] - m[i]);
      for (int j = 0; j < 3; ++j) out[i] += p.impact[i][j] * m[j];
    }
    return out;
  };
  auto axpy = [](const std::array<double, 3>& m, double h, const std::array<double, 3>& k) {
    return std::array<double, 3>{m[0] + h * k[0], m[1] + h * k[1], m[2] + h * k[2]};
  };
  std::array<double, 3> m = p.initial;
  double integral = 0.0;
  const long long steps = static_cast<long long>(std::ceil(horizon / step));
  const double h = horizon / static_cast<double>(steps);
  for (long long k = 0; k < steps; ++k) {
    const auto k1 = rhs(m);
    const auto k2 = rhs(axpy(m, h / 2, k1));
    const auto k3 = rhs(axpy(m, h / 2, k2));
    const auto k4 = rhs(axpy(m, h, k3));
    // Simpson accumulation of m_1 + m_c along the same grid.
    const auto mid = axpy(m, h / 2, k2);
    const auto next = std::array<double, 3>{
        m[0] + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
        m[1] + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]),
        m[2] + h / 6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])};
    integral += h / 6 * ((m[0] + m[2]) + 4 * (mid[0] + mid[2]) + (next[0] + next[2]));
    m = next;
  }
  return {m, integral};
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double standard_error(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / (static_cast<double>(v.size()) - 1.0) /
                   static_cast<double>(v.size()));
}

}  // namespace gmhp::testing

#endif
