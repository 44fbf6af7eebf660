#ifndef GMHP_DIAGNOSTICS_HPP
#define GMHP_DIAGNOSTICS_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "gmhp/kernel.hpp"
#include "gmhp/mark_space.hpp"

namespace gmhp {

enum class IntegrationMode {
  Auto,        // closed forms where the kernel has them, quadrature otherwise
  ClosedForm,  // closed forms only; throws when a kernel lacks them
  Quadrature,  // adaptive quadrature, split at event times
};

// Integrated intensity over (0, t]: the base integral plus, for each history
// event before t, the integral of its excitation pulse. `coordinate` empty
// integrates the total rate, otherwise the rate charging that coordinate.
double compensator(const KernelSpec& spec, const Path& path, double t,
                   std::optional<int> coordinate = std::nullopt,
                   IntegrationMode mode = IntegrationMode::Auto);

// Rescaled inter-event gaps of one coordinate; i.i.d. unit-exponential when
// evaluated against the kernel that generated the path. Values are strictly
// positive. path_id tags the source path when series are collected in bulk.
struct ResidualSeries {
  std::vector<double> values;
  int coordinate = 0;
  long long path_id = 0;
};

ResidualSeries time_rescale(const KernelSpec& spec, const Path& path, int coordinate,
                            IntegrationMode mode = IntegrationMode::Auto);

// Residual gaps pooled across paths by concatenating the rescaled event
// positions: the seam between two paths joins the censored tail of one
// observation window to the head of the next. Within-window gaps alone are
// biased low by O(1 / Lambda(T)) per path; the concatenated gaps are i.i.d.
// unit exponentials up to the single censored tail at the very end.
std::vector<double> pooled_rescaled_gaps(const KernelSpec& spec,
                                         const std::vector<Path>& paths, int coordinate,
                                         IntegrationMode mode = IntegrationMode::Auto);

// One-sample Kolmogorov-Smirnov against the unit-exponential CDF. The p-value
// uses the asymptotic Kolmogorov series and is approximate below n ~ 50.
struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  long long n = 0;
};

KsResult ks_exp1(const std::vector<double>& values);

// Upper tail Q(x) of the Kolmogorov distribution.
double kolmogorov_tail(double x);

struct SampleStats {
  double mean = 0.0;
  double variance = 0.0;
  double se_mean = 0.0;
  double se_variance = 0.0;
  long long n = 0;
};

SampleStats sample_stats(const std::vector<double>& values);

// Monte Carlo summary of coordinate counts at the horizon over independent
// paths, with the paired count-vs-compensator discrepancy per coordinate in
// standard-error units.
struct MeanCountReport {
  std::vector<SampleStats> coordinate_counts;  // per coordinate
  SampleStats common_counts;
  std::vector<double> compensator_gap_se_units;  // per coordinate
  int n_paths = 0;
  double horizon = 0.0;
};

MeanCountReport mean_count_report(const KernelSpec& spec, int n_paths, double horizon,
                                  std::uint64_t seed, int max_generation = 30,
                                  int jobs = 1);

// Same report computed from already-simulated paths.
MeanCountReport mean_count_report(const KernelSpec& spec, const std::vector<Path>& paths);

}  // namespace gmhp

#endif
