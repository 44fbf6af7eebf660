#ifndef GMHP_PRESETS_HPP
#define GMHP_PRESETS_HPP

#include <array>
#include <functional>
#include <utility>
#include <vector>

#include "gmhp/kernel.hpp"
#include "gmhp/markov_exp.hpp"

namespace gmhp {

// Classical univariate self-exciting process on the single-label mark space.
// The response profile defaults to excitation * exp(-decay * u); an arbitrary
// profile can be supplied with its supremum and (if known) total mass.
struct ClassicalParams {
  double base_rate = 1.0;
  // Optional time-varying base rate; requires base_rate_bound.
  std::function<double(double)> base_rate_fn;
  double base_rate_bound = 0.0;

  double excitation = 0.0;  // response weight
  double decay = 1.0;       // exponential response rate

  // Optional general response profile w(u), u > 0, replacing the exponential.
  std::function<double(double)> response_fn;
  double response_bound = 0.0;     // sup_u w(u); required with response_fn
  double response_integral = -1.0; // total mass of w; < 0 when unknown
};

// Expected offspring per event; NaN when unknown.
double branching_ratio(const ClassicalParams& params);

KernelSpec build_classical(const ClassicalParams& params);

// Bivariate point-mark model with common events and exponential decays; the
// kernel spec is interchangeable with the Markov-state simulator built from
// the same ExpParams.
KernelSpec build_bivariate_exp(const ExpParams& params);

// Bivariate model with real-valued (Gaussian) marks. Index order is
// (first, second, common). Decays are indexed by the *source* channel;
// offspring mark means scale the parent value by mark_scale.
struct BivariateGaussParams {
  std::array<double, 3> base_rate{};     // immigrant rates
  std::array<double, 3> base_mean{};     // immigrant mark means
  std::array<double, 3> base_sigma{};    // immigrant mark standard deviations
  std::array<double, 3> decay{};         // per source channel
  std::array<double, 3> mark_scale{};    // parent-value multiplier for offspring means
  std::array<double, 3> impact_own{};    // own-channel impacts g_(1,1), g_(2,2), g_(c,c)
  std::array<double, 3> impact_common{}; // common-channel impacts g_(c,1), g_(c,2), g_(c,c)

  void validate() const;
};

KernelSpec build_bivariate_gauss(const BivariateGaussParams& params);

// Multi-location aftershock model with discrete magnitude marks, power-law
// decay and magnitude-exponential productivity. Cross-term tables have one
// row per target location and one column per source class: the locations in
// order, then the common class last.
struct EtasParams {
  std::vector<double> background;               // per location
  std::vector<double> cutoff;                   // magnitude of completeness per location
  std::vector<std::vector<double>> magnitudes;  // grid per location
  std::vector<std::vector<double>> weights;     // optional, same shape; empty = uniform

  std::vector<std::vector<double>> productivity;    // K0, d x (d+1)
  std::vector<std::vector<double>> magnitude_gain;  // alpha, d x (d+1)
  std::vector<std::vector<double>> offset;          // c > 0, d x (d+1)
  std::vector<std::vector<double>> exponent;        // p > 0, d x (d+1)

  int locations() const { return static_cast<int>(background.size()); }
  void validate() const;
};

KernelSpec build_etas(const EtasParams& params);

// Signed order-flow model: coordinate 2i is an upward move of asset i,
// coordinate 2i+1 a downward move; common tuples move several coordinates at
// once. Only the listed tuples carry intensity.
struct FinanceCojumpParams {
  struct MarkChannel {
    std::vector<int> touched;  // 0-based coordinate indices among the 2*n_assets
    double base_rate = 0.0;
  };

  int n_assets = 1;
  std::vector<MarkChannel> marks;
  std::vector<std::vector<double>> impact;  // [target mark][source mark]
  std::vector<std::vector<double>> decay;   // [target mark][source mark], > 0

  void validate() const;
};

KernelSpec build_finance_cojump(const FinanceCojumpParams& params);

// Price series S_i = (up-moves) - (down-moves) after each event touching the
// asset, as (time, level) pairs.
std::vector<std::vector<std::pair<double, long long>>> price_paths(const Path& path,
                                                                   int n_assets);

}  // namespace gmhp

#endif
