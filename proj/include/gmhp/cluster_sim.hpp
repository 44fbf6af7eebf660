#ifndef GMHP_CLUSTER_SIM_HPP
#define GMHP_CLUSTER_SIM_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gmhp/kernel.hpp"
#include "gmhp/mark_space.hpp"
#include "gmhp/rng.hpp"

namespace gmhp {

struct SimOptions {
  enum class TruncationPolicy { Warn, Error };

  double horizon = 1.0;
  int max_generation = 30;  // last generation kept; its events are not expanded
  std::uint64_t seed = 0;
  TruncationPolicy truncation = TruncationPolicy::Warn;

  void validate() const;
};

// Raised when the generation cap is hit under TruncationPolicy::Error; the
// truncated path is attached.
class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& what, Path partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const Path& partial() const { return partial_; }

 private:
  Path partial_;
};

// Generation-0 events: a dominating Poisson cloud of rate eta_bound on
// (0, horizon], thinned against the base rate, marks from the base kernel.
// Result is time-sorted.
std::vector<Event> simulate_immigrants(const KernelSpec& spec, const SimOptions& options,
                                       RngStream& stream);

// Offspring of one parent: a conditionally-Poisson cloud of rate
// f_bound(parent) on (parent.time, horizon], thinned against the excitation
// rate. Empty when the parent sits at or beyond the horizon.
std::vector<Event> simulate_offspring(const KernelSpec& spec, const Event& parent,
                                      const SimOptions& options, RngStream& stream);

// Full generation-wise construction: immigrants, then per-parent offspring up
// to the generation cap, merged into one time-sorted path. Parents draw from
// substreams keyed by (generation, parent index), so expansion order cannot
// change the result.
Path simulate(const KernelSpec& spec, const SimOptions& options);

// Independent paths with per-path seeds derived from options.seed; `jobs`
// worker threads, output identical for any job count.
std::vector<Path> simulate_batch(const KernelSpec& spec, const SimOptions& options,
                                 int n_paths, int jobs = 1);

struct BranchingSummary {
  std::vector<long long> generation_counts;
  // offspring_per_parent[k] = generation_counts[k+1] / generation_counts[k]
  std::vector<double> offspring_per_parent;
};

BranchingSummary branching_summary(const Path& path);

}  // namespace gmhp

#endif
