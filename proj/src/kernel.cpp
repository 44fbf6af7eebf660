#include "gmhp/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace gmhp {

namespace {

// Relative slack so that exact-supremum bounds do not trip on rounding noise.
constexpr double kBoundSlack = 1e-12;

bool exceeds(double rate, double bound) {
  return rate > bound * (1.0 + kBoundSlack) + 1e-300;
}

}  // namespace

ChannelBaseKernel::ChannelBaseKernel(std::vector<BaseChannel> channels)
    : channels_(std::move(channels)) {
  for (const auto& ch : channels_) {
    if (!ch.rate || !ch.sample)
      throw std::invalid_argument("BaseChannel: rate and sample are required");
    if (!(ch.rate_bound >= 0.0) || !std::isfinite(ch.rate_bound))
      throw std::invalid_argument("BaseChannel: bound must be finite and nonnegative");
    bound_ += ch.rate_bound;
  }
}

double ChannelBaseKernel::total_rate(double t) const {
  double sum = 0.0;
  for (const auto& ch : channels_) sum += ch.rate(t);
  return sum;
}

double ChannelBaseKernel::coordinate_rate(double t, int coordinate) const {
  const std::uint32_t bit = 1u << coordinate;
  double sum = 0.0;
  for (const auto& ch : channels_) {
    if (ch.touched_mask & bit) sum += ch.rate(t);
  }
  return sum;
}

Mark ChannelBaseKernel::sample_mark(double t, RngStream& rng) const {
  const double total = total_rate(t);
  if (!(total > 0.0))
    throw std::logic_error("sample_mark called with zero base rate");
  double u = rng.uniform01() * total;
  for (const auto& ch : channels_) {
    const double r = ch.rate(t);
    if (u <= r) return ch.sample(t, rng);
    u -= r;
  }
  // Rounding spill-over: attribute to the last positive-rate channel.
  for (auto it = channels_.rbegin(); it != channels_.rend(); ++it) {
    if (it->rate(t) > 0.0) return it->sample(t, rng);
  }
  throw std::logic_error("sample_mark: no channel with positive rate");
}

std::optional<double> ChannelBaseKernel::integrated_total(double t0, double t1) const {
  double sum = 0.0;
  for (const auto& ch : channels_) {
    if (!ch.integrated) return std::nullopt;
    sum += ch.integrated(t0, t1);
  }
  return sum;
}

std::optional<double> ChannelBaseKernel::integrated_coordinate(double t0, double t1,
                                                               int coordinate) const {
  const std::uint32_t bit = 1u << coordinate;
  double sum = 0.0;
  for (const auto& ch : channels_) {
    if (!(ch.touched_mask & bit)) continue;
    if (!ch.integrated) return std::nullopt;
    sum += ch.integrated(t0, t1);
  }
  return sum;
}

ChannelExcitationKernel::ChannelExcitationKernel(std::vector<ExcitationChannel> channels)
    : channels_(std::move(channels)) {
  for (const auto& ch : channels_) {
    if (!ch.rate || !ch.sample || !ch.rate_bound)
      throw std::invalid_argument("ExcitationChannel: rate, bound and sample are required");
  }
}

double ChannelExcitationKernel::total_rate(double t, double s, const Mark& parent) const {
  if (s >= t) return 0.0;
  double sum = 0.0;
  for (const auto& ch : channels_) sum += ch.rate(t, s, parent);
  return sum;
}

double ChannelExcitationKernel::coordinate_rate(double t, double s, const Mark& parent,
                                                int coordinate) const {
  if (s >= t) return 0.0;
  const std::uint32_t bit = 1u << coordinate;
  double sum = 0.0;
  for (const auto& ch : channels_) {
    if (ch.touched_mask & bit) sum += ch.rate(t, s, parent);
  }
  return sum;
}

double ChannelExcitationKernel::bound(double s, const Mark& parent) const {
  double sum = 0.0;
  for (const auto& ch : channels_) sum += ch.rate_bound(s, parent);
  return sum;
}

Mark ChannelExcitationKernel::sample_mark(double t, double s, const Mark& parent,
                                          RngStream& rng) const {
  const double total = total_rate(t, s, parent);
  if (!(total > 0.0))
    throw std::logic_error("sample_mark called with zero excitation rate");
  double u = rng.uniform01() * total;
  for (const auto& ch : channels_) {
    const double r = ch.rate(t, s, parent);
    if (u <= r) return ch.sample(t, s, parent, rng);
    u -= r;
  }
  for (auto it = channels_.rbegin(); it != channels_.rend(); ++it) {
    if (it->rate(t, s, parent) > 0.0) return it->sample(t, s, parent, rng);
  }
  throw std::logic_error("sample_mark: no channel with positive rate");
}

std::optional<double> ChannelExcitationKernel::integrated_total(double t0, double t1,
                                                                double s,
                                                                const Mark& parent) const {
  double sum = 0.0;
  for (const auto& ch : channels_) {
    if (!ch.integrated) return std::nullopt;
    sum += ch.integrated(t0, t1, s, parent);
  }
  return sum;
}

std::optional<double> ChannelExcitationKernel::integrated_coordinate(
    double t0, double t1, double s, const Mark& parent, int coordinate) const {
  const std::uint32_t bit = 1u << coordinate;
  double sum = 0.0;
  for (const auto& ch : channels_) {
    if (!(ch.touched_mask & bit)) continue;
    if (!ch.integrated) return std::nullopt;
    sum += ch.integrated(t0, t1, s, parent);
  }
  return sum;
}

double kappa_total(const KernelSpec& spec, double t, const Path& history) {
  double sum = spec.base->total_rate(t);
  for (const auto& e : history.events()) {
    if (e.time >= t) break;  // events are time-sorted; strict past only
    sum += spec.excitation->total_rate(t, e.time, e.mark);
  }
  return sum;
}

double coordinate_intensity(const KernelSpec& spec, double t, int coordinate,
                            const Path& history) {
  if (coordinate < 0 || coordinate >= spec.dimension())
    throw std::out_of_range("coordinate_intensity: coordinate out of range");
  double sum = spec.base->coordinate_rate(t, coordinate);
  for (const auto& e : history.events()) {
    if (e.time >= t) break;
    sum += spec.excitation->coordinate_rate(t, e.time, e.mark, coordinate);
  }
  return sum;
}

double eta_bound(const KernelSpec& spec) { return spec.base->bound(); }

double f_bound(const KernelSpec& spec, double s, const Mark& parent) {
  return spec.excitation->bound(s, parent);
}

BoundReport validate_bounds(const KernelSpec& spec, int grid_resolution, double horizon,
                            std::uint64_t seed, int parent_samples) {
  if (grid_resolution < 1)
    throw std::invalid_argument("validate_bounds: grid resolution must be >= 1");
  if (!(horizon > 0.0))
    throw std::invalid_argument("validate_bounds: horizon must be positive");

  BoundReport report;
  RngStream rng(seed);

  const double eta_hat = spec.base->bound();
  for (int k = 0; k <= grid_resolution; ++k) {
    const double t = horizon * static_cast<double>(k) / grid_resolution;
    const double rate = spec.base->total_rate(t);
    ++report.checks;
    if (exceeds(rate, eta_hat)) {
      report.violations.push_back(
          {BoundViolation::Kind::Base, t, 0.0, rate, eta_hat});
    }
  }

  // Parent marks come from the kernel's own distributions: immigrants first,
  // then one round of offspring marks.
  std::vector<Mark> parents;
  for (int n = 0; n < parent_samples; ++n) {
    RngStream draw = rng.substream(static_cast<std::uint64_t>(n));
    const double t = draw.uniform01() * horizon;
    if (spec.base->total_rate(t) > 0.0) {
      parents.push_back(spec.base->sample_mark(t, draw));
    }
  }
  const std::size_t immigrants = parents.size();
  for (std::size_t n = 0; n < immigrants; ++n) {
    RngStream draw = rng.substream(0x10000ull + n);
    const double s = draw.uniform01() * horizon * 0.5;
    const double t = s + draw.uniform01() * (horizon - s);
    if (spec.excitation->total_rate(t, s, parents[n]) > 0.0) {
      parents.push_back(spec.excitation->sample_mark(t, s, parents[n], draw));
    }
  }

  for (std::size_t n = 0; n < parents.size(); ++n) {
    RngStream draw = rng.substream(0x20000ull + n);
    const double s = draw.uniform01() * horizon;
    const double f_hat = spec.excitation->bound(s, parents[n]);
    for (int k = 1; k <= grid_resolution; ++k) {
      const double t = s + (horizon - s) * static_cast<double>(k) / grid_resolution;
      const double rate = spec.excitation->total_rate(t, s, parents[n]);
      ++report.checks;
      if (exceeds(rate, f_hat)) {
        report.violations.push_back(
            {BoundViolation::Kind::Excitation, t, s, rate, f_hat});
      }
    }
  }
  return report;
}

}  // namespace gmhp
