#include "gmhp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gmhp/cluster_sim.hpp"
#include "gmhp/quadrature.hpp"

namespace gmhp {

namespace {

double base_integral(const KernelSpec& spec, double t0, double t1,
                     std::optional<int> coordinate, IntegrationMode mode) {
  if (t1 <= t0) return 0.0;
  if (mode != IntegrationMode::Quadrature) {
    const auto closed = coordinate ? spec.base->integrated_coordinate(t0, t1, *coordinate)
                                   : spec.base->integrated_total(t0, t1);
    if (closed) return *closed;
    if (mode == IntegrationMode::ClosedForm)
      throw NumericalError("compensator: base kernel has no closed-form integral");
  }
  return detail::integrate(
      [&](double u) {
        return coordinate ? spec.base->coordinate_rate(u, *coordinate)
                          : spec.base->total_rate(u);
      },
      t0, t1);
}

double excitation_integral(const KernelSpec& spec, const Event& e, double t1,
                           std::optional<int> coordinate, IntegrationMode mode) {
  if (t1 <= e.time) return 0.0;
  if (mode != IntegrationMode::Quadrature) {
    const auto closed =
        coordinate
            ? spec.excitation->integrated_coordinate(e.time, t1, e.time, e.mark, *coordinate)
            : spec.excitation->integrated_total(e.time, t1, e.time, e.mark);
    if (closed) return *closed;
    if (mode == IntegrationMode::ClosedForm)
      throw NumericalError("compensator: excitation kernel has no closed-form integral");
  }
  return detail::integrate(
      [&](double u) {
        return coordinate
                   ? spec.excitation->coordinate_rate(u, e.time, e.mark, *coordinate)
                   : spec.excitation->total_rate(u, e.time, e.mark);
      },
      e.time, t1);
}

}  // namespace

double compensator(const KernelSpec& spec, const Path& path, double t,
                   std::optional<int> coordinate, IntegrationMode mode) {
  if (!(t >= 0.0) || t > path.horizon())
    throw std::invalid_argument("compensator: t outside [0, horizon]");
  if (coordinate && (*coordinate < 0 || *coordinate >= spec.dimension()))
    throw std::out_of_range("compensator: coordinate out of range");
  if (t == 0.0) return 0.0;

  // Each source term is smooth on its own integration range, with the
  // excitation pulse of an event starting exactly at that event's time; no
  // further splitting is needed.
  double total = base_integral(spec, 0.0, t, coordinate, mode);
  for (const auto& e : path.events()) {
    if (e.time >= t) break;
    total += excitation_integral(spec, e, t, coordinate, mode);
  }
  return total;
}

ResidualSeries time_rescale(const KernelSpec& spec, const Path& path, int coordinate,
                            IntegrationMode mode) {
  if (coordinate < 0 || coordinate >= spec.dimension())
    throw std::out_of_range("time_rescale: coordinate out of range");
  ResidualSeries out;
  out.coordinate = coordinate;
  double previous = 0.0;
  for (const auto& e : path.events()) {
    if (e.mark.coordinate(coordinate).is_dummy()) continue;
    const double current = compensator(spec, path, e.time, coordinate, mode);
    out.values.push_back(current - previous);
    previous = current;
  }
  return out;
}

std::vector<double> pooled_rescaled_gaps(const KernelSpec& spec,
                                         const std::vector<Path>& paths, int coordinate,
                                         IntegrationMode mode) {
  std::vector<double> gaps;
  double carry = 0.0;  // rescaled exposure since the last pooled event
  for (const auto& path : paths) {
    double previous = 0.0;
    for (const auto& e : path.events()) {
      if (e.mark.coordinate(coordinate).is_dummy()) continue;
      const double current = compensator(spec, path, e.time, coordinate, mode);
      gaps.push_back(carry + current - previous);
      carry = 0.0;
      previous = current;
    }
    carry += compensator(spec, path, path.horizon(), coordinate, mode) - previous;
  }
  return gaps;  // the final carry is censored and dropped
}

double kolmogorov_tail(double x) {
  if (x <= 0.0) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1) ? term : -term;
    if (term < 1e-16) break;
  }
  return std::min(1.0, std::max(0.0, 2.0 * sum));
}

KsResult ks_exp1(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("ks_exp1: empty sample");
  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = -std::expm1(-sorted[i]);
    const double hi = (static_cast<double>(i) + 1.0) / n - cdf;
    const double lo = cdf - static_cast<double>(i) / n;
    d = std::max(d, std::max(hi, lo));
  }
  KsResult out;
  out.statistic = d;
  out.n = static_cast<long long>(sorted.size());
  out.p_value = kolmogorov_tail(std::sqrt(n) * d);
  return out;
}

SampleStats sample_stats(const std::vector<double>& values) {
  SampleStats out;
  out.n = static_cast<long long>(values.size());
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) return out;
  const double n = static_cast<double>(values.size());
  double m2 = 0.0, m4 = 0.0;
  for (double v : values) {
    const double d = v - out.mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  out.variance = m2 / (n - 1.0);
  out.se_mean = std::sqrt(out.variance / n);
  // Standard error of the sample variance from the fourth central moment.
  m4 /= n;
  const double var_of_var =
      (m4 - (n - 3.0) / (n - 1.0) * out.variance * out.variance) / n;
  out.se_variance = std::sqrt(std::max(var_of_var, 0.0));
  return out;
}

MeanCountReport mean_count_report(const KernelSpec& spec, const std::vector<Path>& paths) {
  const int d = spec.dimension();
  MeanCountReport report;
  report.n_paths = static_cast<int>(paths.size());
  report.horizon = paths.empty() ? 0.0 : paths.front().horizon();

  std::vector<std::vector<double>> counts(static_cast<std::size_t>(d));
  std::vector<double> common;
  std::vector<std::vector<double>> gaps(static_cast<std::size_t>(d));
  for (const auto& path : paths) {
    const auto decomposition = count_decomposition(path, path.horizon());
    for (int i = 0; i < d; ++i) {
      const double n_i =
          static_cast<double>(decomposition.per_coordinate[static_cast<std::size_t>(i)]);
      counts[static_cast<std::size_t>(i)].push_back(n_i);
      const double lambda_i = compensator(spec, path, path.horizon(), i);
      gaps[static_cast<std::size_t>(i)].push_back(n_i - lambda_i);
    }
    common.push_back(static_cast<double>(decomposition.common));
  }

  for (int i = 0; i < d; ++i) {
    const auto& gap = gaps[static_cast<std::size_t>(i)];
    report.coordinate_counts.push_back(sample_stats(counts[static_cast<std::size_t>(i)]));
    const auto gap_stats = sample_stats(gap);
    report.compensator_gap_se_units.push_back(
        gap_stats.se_mean > 0.0 ? gap_stats.mean / gap_stats.se_mean : 0.0);
  }
  report.common_counts = sample_stats(common);
  return report;
}

MeanCountReport mean_count_report(const KernelSpec& spec, int n_paths, double horizon,
                                  std::uint64_t seed, int max_generation, int jobs) {
  if (n_paths < 2) throw std::invalid_argument("mean_count_report: n_paths must be >= 2");
  SimOptions options;
  options.horizon = horizon;
  options.max_generation = max_generation;
  options.seed = seed;
  const auto paths = simulate_batch(spec, options, n_paths, jobs);
  return mean_count_report(spec, paths);
}

}  // namespace gmhp
