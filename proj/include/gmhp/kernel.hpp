#ifndef GMHP_KERNEL_HPP
#define GMHP_KERNEL_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gmhp/mark_space.hpp"
#include "gmhp/rng.hpp"

namespace gmhp {

// Autonomous (immigrant) part of the intensity. Rates are per unit time;
// bound() dominates total_rate on all of [0, infinity), so a single kernel
// instance is valid for any finite horizon.
class BaseKernel {
 public:
  virtual ~BaseKernel() = default;

  virtual double total_rate(double t) const = 0;
  // Rate of marks whose i-th coordinate is non-dummy.
  virtual double coordinate_rate(double t, int coordinate) const = 0;
  virtual double bound() const = 0;
  // Mark distributed per total-rate-normalized measure; only called when
  // total_rate(t) > 0.
  virtual Mark sample_mark(double t, RngStream& rng) const = 0;

  // Closed-form integral of the rate over [t0, t1], when available.
  virtual std::optional<double> integrated_total(double t0, double t1) const = 0;
  virtual std::optional<double> integrated_coordinate(double t0, double t1,
                                                      int coordinate) const = 0;
};

// Feedback contribution of a past event (time s, mark x) to the intensity at
// t > s. Rates vanish for t <= s; bound(s, x) dominates on (s, infinity).
class ExcitationKernel {
 public:
  virtual ~ExcitationKernel() = default;

  virtual double total_rate(double t, double s, const Mark& parent) const = 0;
  virtual double coordinate_rate(double t, double s, const Mark& parent,
                                 int coordinate) const = 0;
  virtual double bound(double s, const Mark& parent) const = 0;
  virtual Mark sample_mark(double t, double s, const Mark& parent,
                           RngStream& rng) const = 0;

  virtual std::optional<double> integrated_total(double t0, double t1, double s,
                                                 const Mark& parent) const = 0;
  virtual std::optional<double> integrated_coordinate(double t0, double t1, double s,
                                                      const Mark& parent,
                                                      int coordinate) const = 0;
};

// One additive term of a base kernel: a deterministic rate in t together with
// the distribution of the marks it emits. Every mark drawn from `sample`
// touches exactly the coordinates in `touched_mask`.
struct BaseChannel {
  std::uint32_t touched_mask = 0;
  std::function<double(double t)> rate;
  double rate_bound = 0.0;
  std::function<Mark(double t, RngStream&)> sample;
  // Optional closed form of the rate integral over [t0, t1].
  std::function<double(double t0, double t1)> integrated;
};

// One additive term of an excitation kernel, parameterized by the parent.
struct ExcitationChannel {
  std::uint32_t touched_mask = 0;
  std::function<double(double t, double s, const Mark& parent)> rate;
  std::function<double(double s, const Mark& parent)> rate_bound;
  std::function<Mark(double t, double s, const Mark& parent, RngStream&)> sample;
  std::function<double(double t0, double t1, double s, const Mark& parent)> integrated;
};

class ChannelBaseKernel final : public BaseKernel {
 public:
  explicit ChannelBaseKernel(std::vector<BaseChannel> channels);

  double total_rate(double t) const override;
  double coordinate_rate(double t, int coordinate) const override;
  double bound() const override { return bound_; }
  Mark sample_mark(double t, RngStream& rng) const override;
  std::optional<double> integrated_total(double t0, double t1) const override;
  std::optional<double> integrated_coordinate(double t0, double t1,
                                              int coordinate) const override;

  const std::vector<BaseChannel>& channels() const { return channels_; }

 private:
  std::vector<BaseChannel> channels_;
  double bound_ = 0.0;
};

class ChannelExcitationKernel final : public ExcitationKernel {
 public:
  explicit ChannelExcitationKernel(std::vector<ExcitationChannel> channels);

  double total_rate(double t, double s, const Mark& parent) const override;
  double coordinate_rate(double t, double s, const Mark& parent,
                         int coordinate) const override;
  double bound(double s, const Mark& parent) const override;
  Mark sample_mark(double t, double s, const Mark& parent,
                   RngStream& rng) const override;
  std::optional<double> integrated_total(double t0, double t1, double s,
                                         const Mark& parent) const override;
  std::optional<double> integrated_coordinate(double t0, double t1, double s,
                                              const Mark& parent,
                                              int coordinate) const override;

  const std::vector<ExcitationChannel>& channels() const { return channels_; }

 private:
  std::vector<ExcitationChannel> channels_;
};

// The pair (base, excitation) over a concrete mark space. Immutable and
// shareable; all rate evaluations are pure, randomness is always injected.
struct KernelSpec {
  MarkSpace space;
  std::shared_ptr<const BaseKernel> base;
  std::shared_ptr<const ExcitationKernel> excitation;
  std::vector<std::string> notes;  // builder warnings (e.g. supercritical)

  int dimension() const { return space.dimension(); }
};

// Total intensity at t given the strict past: base rate plus contributions of
// history events with time < t (events at time >= t never contribute).
double kappa_total(const KernelSpec& spec, double t, const Path& history);

// Intensity of marks touching the given coordinate; at most kappa_total.
double coordinate_intensity(const KernelSpec& spec, double t, int coordinate,
                            const Path& history);

double eta_bound(const KernelSpec& spec);
double f_bound(const KernelSpec& spec, double s, const Mark& parent);

// Grid/sample search for rate values exceeding their declared bounds; a clean
// spec yields an empty violation list.
struct BoundViolation {
  enum class Kind { Base, Excitation };
  Kind kind;
  double t = 0.0;
  double s = 0.0;
  double rate = 0.0;
  double bound = 0.0;
};

struct BoundReport {
  std::vector<BoundViolation> violations;
  long long checks = 0;
  bool ok() const { return violations.empty(); }
};

BoundReport validate_bounds(const KernelSpec& spec, int grid_resolution,
                            double horizon, std::uint64_t seed = 0x5eedull,
                            int parent_samples = 16);

}  // namespace gmhp

#endif
