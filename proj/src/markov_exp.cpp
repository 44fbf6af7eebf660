#include "gmhp/markov_exp.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <vector>

#include "gmhp/quadrature.hpp"

namespace gmhp {

void ExpParams::validate() const {
  for (int i = 0; i < 3; ++i) {
    if (!std::isfinite(baseline[i]) || baseline[i] < 0.0)
      throw std::invalid_argument("ExpParams: baselines must be finite and nonnegative");
    if (!std::isfinite(decay[i]) || decay[i] <= 0.0)
      throw std::invalid_argument("ExpParams: decays must be finite and positive");
    if (!std::isfinite(initial[i]) || initial[i] < 0.0)
      throw std::invalid_argument("ExpParams: initial intensities must be finite and nonnegative");
    for (int j = 0; j < 3; ++j) {
      if (!std::isfinite(impact[i][j]) || impact[i][j] < 0.0)
        throw std::invalid_argument("ExpParams: impacts must be finite and nonnegative");
    }
  }
}

IntensityState initial_state(const ExpParams& params) {
  IntensityState s;
  s.lambda = params.initial;
  return s;
}

IntensityState decay(const ExpParams& params, const IntensityState& state, double dt) {
  if (!(dt >= 0.0)) throw std::invalid_argument("decay: dt must be nonnegative");
  IntensityState out = state;
  for (int i = 0; i < 3; ++i) {
    out.lambda[i] = params.baseline[i] +
                    (state.lambda[i] - params.baseline[i]) * std::exp(-params.decay[i] * dt);
  }
  out.time = state.time + dt;
  return out;
}

IntensityState apply_jump(const ExpParams& params, const IntensityState& state,
                          Channel channel) {
  const int j = static_cast<int>(channel);
  IntensityState out = state;
  for (int i = 0; i < 3; ++i) out.lambda[i] += params.impact[i][j];
  if (channel == Channel::First || channel == Channel::Common) ++out.count1;
  if (channel == Channel::Second || channel == Channel::Common) ++out.count2;
  return out;
}

std::array<double, 3> integrated_intensity(const ExpParams& params,
                                           const IntensityState& state, double dt) {
  if (!(dt >= 0.0)) throw std::invalid_argument("integrated_intensity: dt must be nonnegative");
  std::array<double, 3> out{};
  for (int i = 0; i < 3; ++i) {
    const double beta = params.decay[i];
    const double excess = state.lambda[i] - params.baseline[i];
    out[i] = params.baseline[i] * dt + excess * (-std::expm1(-beta * dt)) / beta;
  }
  return out;
}

Mark channel_mark(Channel channel) {
  switch (channel) {
    case Channel::First:
      return Mark::single(2, 0, 1.0);
    case Channel::Second:
      return Mark::single(2, 1, 1.0);
    case Channel::Common: {
      const int coords[] = {0, 1};
      const double values[] = {1.0, 1.0};
      return Mark::touching(2, coords, values);
    }
  }
  throw std::logic_error("channel_mark: bad channel");
}

std::optional<Channel> classify_mark(const Mark& mark) {
  if (mark.dimension() != 2) return std::nullopt;
  switch (mark.touched_mask()) {
    case 0b01:
      return Channel::First;
    case 0b10:
      return Channel::Second;
    case 0b11:
      return Channel::Common;
    default:
      return std::nullopt;
  }
}

ExactSimulator::ExactSimulator(const ExpParams& params, std::uint64_t seed)
    : params_(params), state_(initial_state(params)), rng_(seed) {
  params_.validate();
}

std::optional<Channel> ExactSimulator::next_event(double horizon) {
  while (state_.time < horizon) {
    // Each intensity is monotone between jumps and never crosses its
    // baseline, so this sum dominates the total intensity until the next
    // accepted event.
    double bound = 0.0;
    for (int i = 0; i < 3; ++i) bound += std::max(state_.lambda[i], params_.baseline[i]);
    if (!(bound > 0.0)) {
      state_ = decay(params_, state_, horizon - state_.time);
      return std::nullopt;
    }
    const double wait = rng_.exponential(bound);
    if (state_.time + wait > horizon) {
      state_ = decay(params_, state_, horizon - state_.time);
      return std::nullopt;
    }
    state_ = decay(params_, state_, wait);
    const double total = state_.total_intensity();
    if (rng_.uniform01() * bound <= total) {
      double u = rng_.uniform01() * total;
      Channel chosen = Channel::Common;
      for (Channel c : kChannels) {
        const double r = state_.lambda[static_cast<int>(c)];
        if (u <= r) {
          chosen = c;
          break;
        }
        u -= r;
      }
      state_ = apply_jump(params_, state_, chosen);
      return chosen;
    }
  }
  return std::nullopt;
}

Path simulate_exact(const ExpParams& params, double horizon, std::uint64_t seed) {
  if (!(horizon > 0.0)) throw std::invalid_argument("simulate_exact: horizon must be positive");
  ExactSimulator sim(params, seed);
  std::vector<Event> events;
  while (auto channel = sim.next_event(horizon)) {
    events.push_back(Event{sim.state().time, channel_mark(*channel), 0});
  }
  return Path(std::move(events), horizon, 2);
}

std::vector<Path> simulate_exact_batch(const ExpParams& params, double horizon,
                                       std::uint64_t seed, int n_paths, int jobs) {
  if (n_paths < 0) throw std::invalid_argument("simulate_exact_batch: n_paths must be >= 0");
  std::vector<std::optional<Path>> slots(static_cast<std::size_t>(n_paths));
  const int workers = std::max(1, std::min(jobs, n_paths));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int j = next.fetch_add(1); j < n_paths; j = next.fetch_add(1)) {
      slots[static_cast<std::size_t>(j)] =
          simulate_exact(params, horizon, derive_path_seed(seed, static_cast<std::uint64_t>(j)));
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  std::vector<Path> out;
  out.reserve(slots.size());
  for (auto& p : slots) out.push_back(std::move(*p));
  return out;
}

std::array<double, 3> time_average_intensity(const ExpParams& params, double from,
                                             double to, std::uint64_t seed) {
  if (!(to > from) || !(from >= 0.0))
    throw std::invalid_argument("time_average_intensity: need 0 <= from < to");
  ExactSimulator sim(params, seed);
  std::array<double, 3> acc{};
  IntensityState prev = sim.state();
  auto accumulate_segment = [&](const IntensityState& at, double until) {
    const double lo = std::max(at.time, from);
    const double hi = std::min(until, to);
    if (hi <= lo) return;
    const IntensityState start = decay(params, at, lo - at.time);
    const auto seg = integrated_intensity(params, start, hi - lo);
    for (int i = 0; i < 3; ++i) acc[i] += seg[i];
  };
  while (true) {
    auto channel = sim.next_event(to);
    const double segment_end = sim.state().time;
    accumulate_segment(prev, segment_end);
    prev = sim.state();
    if (!channel) break;
  }
  for (auto& a : acc) a /= (to - from);
  return acc;
}

TestFunction TestFunction::constant(double c) {
  TestFunction v;
  v.value = [c](const IntensityState&) { return c; };
  v.lambda_gradient = [](const IntensityState&) { return std::array<double, 3>{}; };
  v.quadratic_in_lambda = true;
  return v;
}

TestFunction TestFunction::count1() {
  TestFunction v;
  v.value = [](const IntensityState& s) { return static_cast<double>(s.count1); };
  v.lambda_gradient = [](const IntensityState&) { return std::array<double, 3>{}; };
  v.quadratic_in_lambda = true;
  return v;
}

TestFunction TestFunction::intensity1() {
  TestFunction v;
  v.value = [](const IntensityState& s) { return s.lambda[0]; };
  v.lambda_gradient = [](const IntensityState&) {
    return std::array<double, 3>{1.0, 0.0, 0.0};
  };
  v.quadratic_in_lambda = true;
  return v;
}

TestFunction TestFunction::intensity1_count1() {
  TestFunction v;
  v.value = [](const IntensityState& s) {
    return s.lambda[0] * static_cast<double>(s.count1);
  };
  v.lambda_gradient = [](const IntensityState& s) {
    return std::array<double, 3>{static_cast<double>(s.count1), 0.0, 0.0};
  };
  v.quadratic_in_lambda = true;
  return v;
}

double generator_apply(const ExpParams& params, const TestFunction& v,
                       const IntensityState& state) {
  const auto grad = v.lambda_gradient(state);
  double out = 0.0;
  for (int i = 0; i < 3; ++i) {
    out += params.decay[i] * (params.baseline[i] - state.lambda[i]) * grad[i];
  }
  const double here = v.value(state);
  for (Channel c : kChannels) {
    const double rate = state.lambda[static_cast<int>(c)];
    out += rate * (v.value(apply_jump(params, state, c)) - here);
  }
  return out;
}

namespace {

// Av along the event-free flow started at `start`, as a function of the
// elapsed time; counts are constant on the segment.
double generator_along_flow(const ExpParams& params, const TestFunction& v,
                            const IntensityState& start, double u) {
  return generator_apply(params, v, decay(params, start, u));
}

// Exact integral of Av over an event-free segment of length dt, for v
// quadratic in the intensities at fixed counts. The quadratic coefficients of
// lambda -> Av(lambda; counts) are recovered from 10 point evaluations, then
// integrated against the exponential flow term by term.
double integrate_generator_quadratic(const ExpParams& params, const TestFunction& v,
                                     const IntensityState& start, double dt) {
  IntensityState probe = start;
  auto eval = [&](double l1, double l2, double lc) {
    probe.lambda = {l1, l2, lc};
    return generator_apply(params, v, probe);
  };

  const double c0 = eval(0.0, 0.0, 0.0);
  std::array<double, 3> lin{};
  std::array<std::array<double, 3>, 3> quad{};
  for (int i = 0; i < 3; ++i) {
    std::array<double, 3> e1{}, e2{};
    e1[i] = 1.0;
    e2[i] = 2.0;
    const double g1 = eval(e1[0], e1[1], e1[2]);
    const double g2 = eval(e2[0], e2[1], e2[2]);
    quad[i][i] = 0.5 * (g2 - 2.0 * g1 + c0);
    lin[i] = g1 - c0 - quad[i][i];
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      std::array<double, 3> e{};
      e[i] = 1.0;
      e[j] = 1.0;
      const double gij = eval(e[0], e[1], e[2]);
      quad[i][j] = gij - c0 - lin[i] - lin[j] - quad[i][i] - quad[j][j];
    }
  }

  const auto& alpha = params.baseline;
  std::array<double, 3> excess{}, single{};
  for (int i = 0; i < 3; ++i) {
    excess[i] = start.lambda[i] - alpha[i];
    single[i] = (-std::expm1(-params.decay[i] * dt)) / params.decay[i];
  }
  auto pair_integral = [&](int i, int j) {
    const double beta_sum = params.decay[i] + params.decay[j];
    const double cross = (-std::expm1(-beta_sum * dt)) / beta_sum;
    return alpha[i] * alpha[j] * dt + alpha[i] * excess[j] * single[j] +
           alpha[j] * excess[i] * single[i] + excess[i] * excess[j] * cross;
  };

  double out = c0 * dt;
  for (int i = 0; i < 3; ++i) {
    out += lin[i] * (alpha[i] * dt + excess[i] * single[i]);
    out += quad[i][i] * pair_integral(i, i);
    for (int j = i + 1; j < 3; ++j) out += quad[i][j] * pair_integral(i, j);
  }
  return out;
}

double integrate_generator_segment(const ExpParams& params, const TestFunction& v,
                                   const IntensityState& start, double dt) {
  if (dt <= 0.0) return 0.0;
  if (v.quadratic_in_lambda) {
    return integrate_generator_quadratic(params, v, start, dt);
  }
  detail::QuadratureOptions opts;
  opts.rel_tol = 1e-8;
  return detail::integrate(
      [&](double u) { return generator_along_flow(params, v, start, u); }, 0.0, dt, opts);
}

}  // namespace

DynkinResult dynkin_residual(const ExpParams& params, const TestFunction& v,
                             double horizon, int n_paths, std::uint64_t seed) {
  if (n_paths < 1) throw std::invalid_argument("dynkin_residual: n_paths must be >= 1");
  if (!(horizon > 0.0)) throw std::invalid_argument("dynkin_residual: horizon must be positive");

  double sum = 0.0;
  double sum_sq = 0.0;
  for (int j = 0; j < n_paths; ++j) {
    ExactSimulator sim(params, derive_path_seed(seed, static_cast<std::uint64_t>(j)));
    const double v0 = v.value(sim.state());
    double integral = 0.0;
    IntensityState segment_start = sim.state();
    while (true) {
      auto channel = sim.next_event(horizon);
      double segment_end_time = sim.state().time;
      IntensityState end_state = sim.state();
      // next_event leaves the state after the jump; the integrand uses the
      // pre-jump flow, which matches `segment_start` decayed to the event.
      integral += integrate_generator_segment(params, v, segment_start,
                                              segment_end_time - segment_start.time);
      segment_start = end_state;
      if (!channel) break;
    }
    const double residual = v.value(sim.state()) - v0 - integral;
    sum += residual;
    sum_sq += residual * residual;
  }
  DynkinResult out;
  out.n_paths = n_paths;
  out.residual_mean = sum / n_paths;
  if (n_paths > 1) {
    const double var = (sum_sq - sum * sum / n_paths) / (n_paths - 1);
    out.standard_error = std::sqrt(std::max(var, 0.0) / n_paths);
  }
  return out;
}

bool is_marginal_markov(const ExpParams& params, int coordinate) {
  if (coordinate != 0 && coordinate != 1)
    throw std::out_of_range("is_marginal_markov: coordinate must be 0 or 1");
  const int own = coordinate;
  const int other = 1 - coordinate;
  const int c = 2;
  return params.impact[own][other] == 0.0 && params.impact[c][other] == 0.0 &&
         params.decay[own] == params.decay[c] &&
         params.impact[own][c] + params.impact[c][c] ==
             params.impact[own][own] + params.impact[c][own];
}

Path simulate_marginal(const ExpParams& params, int coordinate, double horizon,
                       std::uint64_t seed) {
  if (!is_marginal_markov(params, coordinate))
    throw std::invalid_argument(
        "simulate_marginal: parameters do not make this coordinate Markov on its own");
  if (!(horizon > 0.0)) throw std::invalid_argument("simulate_marginal: horizon must be positive");
  const int own = coordinate;
  const int c = 2;
  // The summed intensity lambda_own + lambda_c is a univariate exponential
  // Hawkes intensity: every own-coordinate event bumps it by the same amount.
  const double alpha = params.baseline[own] + params.baseline[c];
  const double beta = params.decay[own];
  const double jump = params.impact[own][own] + params.impact[c][own];
  double lambda = params.initial[own] + params.initial[c];
  double t = 0.0;
  RngStream rng(seed);
  std::vector<Event> events;
  while (t < horizon) {
    const double bound = std::max(lambda, alpha);
    if (!(bound > 0.0)) break;
    const double wait = rng.exponential(bound);
    if (t + wait > horizon) break;
    t += wait;
    lambda = alpha + (lambda - alpha) * std::exp(-beta * wait);
    if (rng.uniform01() * bound <= lambda) {
      events.push_back(Event{t, Mark::single(1, 0, 1.0), 0});
      lambda += jump;
    }
  }
  return Path(std::move(events), horizon, 1);
}

void write_intensity_trace_csv(std::ostream& out, const ExpParams& params,
                               double horizon, std::uint64_t seed, int grid_points) {
  if (grid_points < 2)
    throw std::invalid_argument("write_intensity_trace_csv: need at least 2 grid points");
  if (!(horizon > 0.0))
    throw std::invalid_argument("write_intensity_trace_csv: horizon must be positive");

  ExactSimulator sim(params, seed);
  std::vector<IntensityState> at_events;
  while (sim.next_event(horizon)) at_events.push_back(sim.state());

  out << "t,lambda1,lambda2,lambdac,N1,N2\n";
  auto write_row = [&](const IntensityState& s) {
    out << format_mark_value(s.time) << ',' << format_mark_value(s.lambda[0]) << ','
        << format_mark_value(s.lambda[1]) << ',' << format_mark_value(s.lambda[2]) << ','
        << s.count1 << ',' << s.count2 << '\n';
  };

  IntensityState current = initial_state(params);
  std::size_t next_event = 0;
  for (int k = 0; k < grid_points; ++k) {
    const double t = horizon * static_cast<double>(k) / (grid_points - 1);
    while (next_event < at_events.size() && at_events[next_event].time <= t) {
      current = at_events[next_event];
      write_row(current);
      ++next_event;
    }
    // Skip the grid row when an event landed exactly on the grid time.
    if (current.time == t && next_event > 0) continue;
    write_row(decay(params, current, t - current.time));
  }
}

}  // namespace gmhp
