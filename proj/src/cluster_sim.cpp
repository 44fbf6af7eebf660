#include "gmhp/cluster_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

namespace gmhp {

void SimOptions::validate() const {
  if (!(horizon > 0.0)) throw std::invalid_argument("SimOptions: horizon must be positive");
  if (max_generation < 0)
    throw std::invalid_argument("SimOptions: max_generation must be nonnegative");
}

std::vector<Event> simulate_immigrants(const KernelSpec& spec, const SimOptions& options,
                                       RngStream& stream) {
  options.validate();
  const double horizon = options.horizon;
  const double eta_hat = spec.base->bound();
  std::vector<Event> events;
  const long long candidates = stream.poisson(horizon * eta_hat);
  for (long long i = 0; i < candidates; ++i) {
    RngStream draw = stream.substream(static_cast<std::uint64_t>(i));
    const double t = horizon * draw.uniform01();
    const double a = eta_hat * draw.uniform01();
    if (a <= spec.base->total_rate(t)) {
      events.push_back(Event{t, spec.base->sample_mark(t, draw), 0});
    }
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const Event& x, const Event& y) { return x.time < y.time; });
  return events;
}

std::vector<Event> simulate_offspring(const KernelSpec& spec, const Event& parent,
                                      const SimOptions& options, RngStream& stream) {
  options.validate();
  const double horizon = options.horizon;
  const double s = parent.time;
  std::vector<Event> events;
  if (s >= horizon) return events;
  const double f_hat = spec.excitation->bound(s, parent.mark);
  const long long candidates = stream.poisson((horizon - s) * f_hat);
  for (long long i = 0; i < candidates; ++i) {
    RngStream draw = stream.substream(static_cast<std::uint64_t>(i));
    const double t = s + (horizon - s) * draw.uniform01();
    const double a = f_hat * draw.uniform01();
    if (a <= spec.excitation->total_rate(t, s, parent.mark)) {
      events.push_back(
          Event{t, spec.excitation->sample_mark(t, s, parent.mark, draw),
                parent.generation + 1});
    }
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const Event& x, const Event& y) { return x.time < y.time; });
  return events;
}

namespace {

struct Ordered {
  Event event;
  int index;  // creation order within the generation
};

}  // namespace

Path simulate(const KernelSpec& spec, const SimOptions& options) {
  options.validate();
  RngStream root(options.seed);

  std::vector<std::vector<Ordered>> generations;

  {
    RngStream stream = root.substream(0).substream(0);
    auto immigrants = simulate_immigrants(spec, options, stream);
    std::vector<Ordered> gen;
    gen.reserve(immigrants.size());
    for (std::size_t i = 0; i < immigrants.size(); ++i) {
      gen.push_back({std::move(immigrants[i]), static_cast<int>(i)});
    }
    generations.push_back(std::move(gen));
  }

  for (int k = 0; k < options.max_generation && !generations.back().empty(); ++k) {
    const auto& parents = generations[static_cast<std::size_t>(k)];
    RngStream gen_stream = root.substream(static_cast<std::uint64_t>(k) + 1);
    std::vector<Ordered> next;
    for (std::size_t j = 0; j < parents.size(); ++j) {
      RngStream parent_stream = gen_stream.substream(j);
      auto children = simulate_offspring(spec, parents[j].event, options, parent_stream);
      for (auto& child : children) next.push_back({std::move(child), 0});
    }
    // Order within the generation by time, tie-broken deterministically, and
    // re-index so the next generation's substream labels are stable.
    std::stable_sort(next.begin(), next.end(), [](const Ordered& x, const Ordered& y) {
      return x.event.time < y.event.time;
    });
    for (std::size_t i = 0; i < next.size(); ++i) next[i].index = static_cast<int>(i);
    generations.push_back(std::move(next));
  }

  const bool truncated =
      static_cast<int>(generations.size()) == options.max_generation + 1 &&
      !generations.back().empty();

  std::vector<Event> merged;
  for (auto& gen : generations) {
    for (auto& o : gen) merged.push_back(std::move(o.event));
  }
  // Ties resolved by (generation, creation order); stable sort keeps the
  // creation order of the per-generation lists.
  std::stable_sort(merged.begin(), merged.end(), [](const Event& x, const Event& y) {
    if (x.time != y.time) return x.time < y.time;
    return x.generation < y.generation;
  });

  Path path(std::move(merged), options.horizon, spec.dimension(), truncated);
  if (truncated && options.truncation == SimOptions::TruncationPolicy::Error) {
    std::ostringstream msg;
    msg << "generation cap " << options.max_generation
        << " reached with events still being produced";
    throw TruncationError(msg.str(), std::move(path));
  }
  return path;
}

std::vector<Path> simulate_batch(const KernelSpec& spec, const SimOptions& options,
                                 int n_paths, int jobs) {
  if (n_paths < 0) throw std::invalid_argument("simulate_batch: n_paths must be >= 0");
  options.validate();
  std::vector<std::optional<Path>> slots(static_cast<std::size_t>(n_paths));
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto work = [&] {
    SimOptions per_path = options;
    for (int j = next.fetch_add(1); j < n_paths && !failed.load(); j = next.fetch_add(1)) {
      per_path.seed = derive_path_seed(options.seed, static_cast<std::uint64_t>(j));
      try {
        slots[static_cast<std::size_t>(j)] = simulate(spec, per_path);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!failed.exchange(true)) first_error = std::current_exception();
      }
    }
  };
  const int workers = std::max(1, std::min(jobs, n_paths));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failed.load()) std::rethrow_exception(first_error);
  std::vector<Path> out;
  out.reserve(slots.size());
  for (auto& p : slots) out.push_back(std::move(*p));
  return out;
}

BranchingSummary branching_summary(const Path& path) {
  BranchingSummary out;
  for (const auto& e : path.events()) {
    const std::size_t g = static_cast<std::size_t>(e.generation);
    if (out.generation_counts.size() <= g) out.generation_counts.resize(g + 1, 0);
    ++out.generation_counts[g];
  }
  if (!out.generation_counts.empty()) {
    out.offspring_per_parent.resize(out.generation_counts.size() - 1, 0.0);
    for (std::size_t k = 0; k + 1 < out.generation_counts.size(); ++k) {
      if (out.generation_counts[k] > 0) {
        out.offspring_per_parent[k] =
            static_cast<double>(out.generation_counts[k + 1]) /
            static_cast<double>(out.generation_counts[k]);
      }
    }
  }
  return out;
}

}  // namespace gmhp
