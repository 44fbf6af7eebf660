#ifndef GMHP_MARKOV_EXP_HPP
#define GMHP_MARKOV_EXP_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>

#include "gmhp/mark_space.hpp"
#include "gmhp/rng.hpp"

namespace gmhp {

// Jump channels of the bivariate model with common events: an event either
// touches coordinate 1 alone, coordinate 2 alone, or both at once.
enum class Channel : int { First = 0, Second = 1, Common = 2 };

constexpr std::array<Channel, 3> kChannels = {Channel::First, Channel::Second,
                                              Channel::Common};

// Parameters of the bivariate exponential-kernel model. Index order is
// (first, second, common) throughout; impact[i][j] is the jump of intensity i
// when channel j fires.
struct ExpParams {
  std::array<double, 3> baseline{};            // reversion levels
  std::array<double, 3> decay{};               // mean-reversion speeds, > 0
  std::array<double, 3> initial{};             // intensities at time 0
  std::array<std::array<double, 3>, 3> impact{};

  void validate() const;  // throws std::invalid_argument
};

// Markov state: channel intensities, coordinate counts, and the clock.
struct IntensityState {
  std::array<double, 3> lambda{};
  long long count1 = 0;
  long long count2 = 0;
  double time = 0.0;

  double total_intensity() const { return lambda[0] + lambda[1] + lambda[2]; }
};

IntensityState initial_state(const ExpParams& params);

// Deterministic flow between events: each intensity relaxes exponentially
// toward its baseline; counts unchanged, clock advanced.
IntensityState decay(const ExpParams& params, const IntensityState& state, double dt);

// State immediately after a channel fires: every intensity is bumped by its
// impact-column entry and the touched counts increment.
IntensityState apply_jump(const ExpParams& params, const IntensityState& state,
                          Channel channel);

// Integral of each intensity over [state.time, state.time + dt] along the
// event-free flow, in closed form.
std::array<double, 3> integrated_intensity(const ExpParams& params,
                                           const IntensityState& state, double dt);

// The 2-dimensional point mark emitted by a channel.
Mark channel_mark(Channel channel);
std::optional<Channel> classify_mark(const Mark& mark);

// Exact path sampler: thinning against the piecewise bound
// sum_i max(lambda_i, baseline_i), which dominates the total intensity on any
// event-free stretch and is refreshed at every candidate.
class ExactSimulator {
 public:
  ExactSimulator(const ExpParams& params, std::uint64_t seed);

  const IntensityState& state() const { return state_; }

  // Advances to the next accepted event at or before `horizon` and applies
  // its jump. Returns the channel fired, or nullopt once no further event
  // occurs (the state is then left exactly at the horizon).
  std::optional<Channel> next_event(double horizon);

 private:
  ExpParams params_;
  IntensityState state_;
  RngStream rng_;
};

Path simulate_exact(const ExpParams& params, double horizon, std::uint64_t seed);

std::vector<Path> simulate_exact_batch(const ExpParams& params, double horizon,
                                       std::uint64_t seed, int n_paths, int jobs = 1);

// Time average of each intensity over [from, to] on a single path (exact
// integrals between events).
std::array<double, 3> time_average_intensity(const ExpParams& params, double from,
                                             double to, std::uint64_t seed);

// Test function v(state) with the partial derivatives in the intensities.
// `quadratic_in_lambda` asserts that v is polynomial of degree <= 2 in the
// intensities for fixed counts, unlocking closed-form Dynkin integrals.
struct TestFunction {
  std::function<double(const IntensityState&)> value;
  std::function<std::array<double, 3>(const IntensityState&)> lambda_gradient;
  bool quadratic_in_lambda = false;

  static TestFunction constant(double c);
  static TestFunction count1();             // v = n1
  static TestFunction intensity1();         // v = lambda1
  static TestFunction intensity1_count1();  // v = lambda1 * n1
};

// Strong generator applied to v at the given state: drift terms plus
// rate-weighted jump differences.
double generator_apply(const ExpParams& params, const TestFunction& v,
                       const IntensityState& state);

struct DynkinResult {
  double residual_mean = 0.0;
  double standard_error = 0.0;
  int n_paths = 0;
};

// Monte Carlo estimate of E[v(Z_T) - v(Z_0) - int_0^T Av(Z_u) du]; zero in
// expectation for well-behaved v. The time integral uses exact closed forms
// when v is quadratic in the intensities, adaptive quadrature otherwise.
DynkinResult dynkin_residual(const ExpParams& params, const TestFunction& v,
                             double horizon, int n_paths, std::uint64_t seed);

// Whether (lambda_i + lambda_c, N_i) is Markov on its own for coordinate
// `coordinate` (0 or 1): no feedback from the other coordinate, matching
// decays, and matching total impact of own and common jumps.
bool is_marginal_markov(const ExpParams& params, int coordinate = 0);

// Reduced-state sampler for the coordinate process, valid only when
// is_marginal_markov holds; returns a 1-dimensional path of that coordinate.
Path simulate_marginal(const ExpParams& params, int coordinate, double horizon,
                       std::uint64_t seed);

// CSV trace "t,lambda1,lambda2,lambdac,N1,N2" on an equidistant grid plus
// every event time; event rows carry post-jump values.
void write_intensity_trace_csv(std::ostream& out, const ExpParams& params,
                               double horizon, std::uint64_t seed, int grid_points);

}  // namespace gmhp

#endif
