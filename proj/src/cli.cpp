#include "gmhp/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "gmhp/cluster_sim.hpp"
#include "gmhp/diagnostics.hpp"
#include "gmhp/markov_exp.hpp"

namespace gmhp {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string resolve_path(const OutputSpec& output, const CliOverrides& overrides) {
  fs::path p(output.path);
  if (overrides.out_dir && p.is_relative()) p = fs::path(*overrides.out_dir) / p;
  return p.string();
}

std::ofstream open_output(const std::string& path) {
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream file(p);
  if (!file) throw std::runtime_error("cannot open output file '" + path + "'");
  return file;
}

// Inserts a zero-padded path index before the extension: events.csv ->
// events_0003.csv.
std::string per_path_name(const std::string& base, int index) {
  fs::path p(base);
  char suffix[16];
  std::snprintf(suffix, sizeof(suffix), "_%04d", index);
  fs::path named = p.parent_path() / (p.stem().string() + suffix + p.extension().string());
  return named.string();
}

std::vector<Path> run_engine(const RunConfig& config, std::uint64_t seed, int jobs,
                             const KernelSpec& spec) {
  if (config.engine == RunConfig::Engine::Markov) {
    return simulate_exact_batch(std::get<ExpParams>(config.model.params), config.horizon,
                                seed, config.n_paths, jobs);
  }
  SimOptions options;
  options.horizon = config.horizon;
  options.max_generation = config.max_generation;
  options.seed = seed;
  options.truncation = config.truncation;
  return simulate_batch(spec, options, config.n_paths, jobs);
}

struct Gate {
  std::string name;
  bool passed = true;
  bool applicable = true;
  std::string detail;
};

json gates_to_json(const std::vector<Gate>& gates) {
  json out = json::array();
  for (const auto& g : gates) {
    out.push_back({{"name", g.name},
                   {"status", !g.applicable ? "insufficient data" : g.passed ? "pass" : "fail"},
                   {"detail", g.detail}});
  }
  return out;
}

}  // namespace

int cmd_simulate(const RunConfig& config, const CliOverrides& overrides,
                 std::ostream& out, std::ostream& err) {
  const std::uint64_t seed = overrides.seed.value_or(config.seed);
  const KernelSpec spec = build_kernel(config.model);
  for (const auto& note : spec.notes) err << "warning: " << note << "\n";

  std::vector<Path> paths;
  try {
    paths = run_engine(config, seed, overrides.jobs, spec);
  } catch (const TruncationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitTruncation;
  }

  for (const auto& output : config.outputs) {
    if (output.kind != OutputSpec::Kind::Events) continue;
    const std::string base = resolve_path(output, overrides);
    if (output.per_path) {
      for (std::size_t j = 0; j < paths.size(); ++j) {
        auto file = open_output(per_path_name(base, static_cast<int>(j)));
        write_events_csv(file, paths[j], spec.space);
      }
    } else {
      auto file = open_output(base);
      write_events_csv(file, paths, spec.space);
    }
  }

  long long total_events = 0;
  int truncated_paths = 0;
  for (const auto& p : paths) {
    total_events += static_cast<long long>(p.size());
    if (p.truncated()) ++truncated_paths;
    if (p.tie_count() > 0)
      err << "warning: " << p.tie_count() << " exact time tie(s) in one path\n";
  }
  out << "simulated " << paths.size() << " path(s), horizon " << config.horizon
      << ", events " << total_events;
  if (truncated_paths > 0) out << ", truncated " << truncated_paths;
  out << "\n";
  return kExitOk;
}

int cmd_trace(const RunConfig& config, const CliOverrides& overrides, std::ostream& out,
              std::ostream& err) {
  if (config.model.id != PresetId::BivariateExp) {
    err << "error: config field 'engine': trace requires the bivariate_exp model\n";
    return kExitConfigError;
  }
  const std::uint64_t seed = overrides.seed.value_or(config.seed);
  const auto& params = std::get<ExpParams>(config.model.params);

  bool wrote = false;
  for (const auto& output : config.outputs) {
    if (output.kind != OutputSpec::Kind::IntensityTrace) continue;
    auto file = open_output(resolve_path(output, overrides));
    write_intensity_trace_csv(file, params, config.horizon,
                              derive_path_seed(seed, 0), config.trace_grid);
    wrote = true;
  }
  if (!wrote) {
    write_intensity_trace_csv(out, params, config.horizon, derive_path_seed(seed, 0),
                              config.trace_grid);
  }
  return kExitOk;
}

int cmd_validate(const RunConfig& config, const CliOverrides& overrides,
                 std::ostream& out, std::ostream& err) {
  const std::uint64_t seed = overrides.seed.value_or(config.seed);
  const KernelSpec spec = build_kernel(config.model);
  const KernelSpec reference = config.validate.reference_model
                                   ? build_kernel(*config.validate.reference_model)
                                   : spec;
  const double level = config.validate.ks_level;
  const double units = config.validate.se_units;

  SimOptions options;
  options.horizon = config.horizon;
  options.max_generation = config.max_generation;
  options.seed = seed;
  options.truncation = config.truncation;
  std::vector<Path> paths;
  try {
    paths = simulate_batch(spec, options, config.n_paths, overrides.jobs);
  } catch (const TruncationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitTruncation;
  }

  const bool enough = config.n_paths >= 2;
  const int d = spec.dimension();
  std::vector<Gate> gates;
  json report;

  const auto counts = mean_count_report(reference, paths);
  {
    json mean_counts, variances, se, gap;
    for (int i = 0; i < d; ++i) {
      const auto& s = counts.coordinate_counts[static_cast<std::size_t>(i)];
      const std::string key = "N" + std::to_string(i + 1);
      mean_counts[key] = s.mean;
      variances[key] = s.variance;
      se[key] = s.se_mean;
      gap[key] = counts.compensator_gap_se_units[static_cast<std::size_t>(i)];
      Gate g;
      g.name = "compensator_identity_" + key;
      if (!enough) {
        g.applicable = false;
        g.detail = "needs at least 2 paths";
      } else {
        const double gap_units = counts.compensator_gap_se_units[static_cast<std::size_t>(i)];
        g.passed = std::abs(gap_units) <= units;
        std::ostringstream detail;
        detail << "count-vs-compensator gap " << gap_units << " se units (limit " << units
               << ")";
        g.detail = detail.str();
      }
      gates.push_back(std::move(g));
    }
    mean_counts["Nc"] = counts.common_counts.mean;
    variances["Nc"] = counts.common_counts.variance;
    se["Nc"] = counts.common_counts.se_mean;
    report["mean_counts"] = mean_counts;
    report["variances"] = variances;
    report["se"] = se;
    report["compensator_gap_se_units"] = gap;
  }

  {
    json ks_report;
    for (int i = 0; i < d; ++i) {
      const auto pooled = pooled_rescaled_gaps(reference, paths, i);
      const std::string key = "N" + std::to_string(i + 1);
      Gate g;
      g.name = "time_rescaling_ks_" + key;
      if (pooled.empty()) {
        g.applicable = false;
        g.detail = "no events on this coordinate";
        ks_report[key] = {{"D", nullptr}, {"p", nullptr}, {"n", 0}};
      } else {
        const auto ks = ks_exp1(pooled);
        ks_report[key] = {{"D", ks.statistic}, {"p", ks.p_value}, {"n", ks.n}};
        if (!enough) {
          g.applicable = false;
          g.detail = "needs at least 2 paths";
        } else {
          g.passed = ks.p_value >= level;
          std::ostringstream detail;
          detail << "KS D=" << ks.statistic << ", p=" << ks.p_value << " (level " << level
                 << ", n=" << ks.n << ")";
          g.detail = detail.str();
        }
      }
      gates.push_back(std::move(g));
    }
    report["ks"] = ks_report;
  }

  if (config.model.id == PresetId::BivariateExp && d == 2) {
    const auto& params = std::get<ExpParams>(config.model.params);
    const auto markov_paths = simulate_exact_batch(
        params, config.horizon, derive_path_seed(seed, 0x6d61726bull), config.n_paths,
        overrides.jobs);
    const auto markov_counts = mean_count_report(reference, markov_paths);
    json cross;
    auto compare = [&](const std::string& key, const SampleStats& a, const SampleStats& b,
                       bool variances_too) {
      const double combined = std::hypot(a.se_mean, b.se_mean);
      const double gap_units = combined > 0.0 ? (a.mean - b.mean) / combined : 0.0;
      cross[key + "_mean_gap_se_units"] = gap_units;
      Gate g;
      g.name = "cross_engine_mean_" + key;
      if (!enough) {
        g.applicable = false;
        g.detail = "needs at least 2 paths";
      } else {
        g.passed = std::abs(gap_units) <= units;
        std::ostringstream detail;
        detail << "mean gap " << gap_units << " se units (limit " << units << ")";
        g.detail = detail.str();
      }
      gates.push_back(std::move(g));
      if (variances_too) {
        const double combined_var = std::hypot(a.se_variance, b.se_variance);
        const double var_units =
            combined_var > 0.0 ? (a.variance - b.variance) / combined_var : 0.0;
        cross[key + "_variance_gap_se_units"] = var_units;
        Gate gv;
        gv.name = "cross_engine_variance_" + key;
        if (!enough) {
          gv.applicable = false;
          gv.detail = "needs at least 2 paths";
        } else {
          gv.passed = std::abs(var_units) <= units;
          std::ostringstream detail;
          detail << "variance gap " << var_units << " se units (limit " << units << ")";
          gv.detail = detail.str();
        }
        gates.push_back(std::move(gv));
      }
    };
    compare("N1", counts.coordinate_counts[0], markov_counts.coordinate_counts[0], true);
    compare("N2", counts.coordinate_counts[1], markov_counts.coordinate_counts[1], false);
    compare("Nc", counts.common_counts, markov_counts.common_counts, false);
    report["cross_engine"] = cross;
  }

  report["gates"] = gates_to_json(gates);
  report["n_paths"] = config.n_paths;
  report["horizon"] = config.horizon;

  for (const auto& output : config.outputs) {
    if (output.kind != OutputSpec::Kind::Report) continue;
    auto file = open_output(resolve_path(output, overrides));
    file << report.dump(2) << "\n";
  }

  bool any_failed = false;
  bool any_inapplicable = false;
  for (const auto& g : gates) {
    if (!g.applicable) {
      any_inapplicable = true;
      out << "[SKIP] " << g.name << ": " << g.detail << "\n";
    } else if (g.passed) {
      out << "[PASS] " << g.name << ": " << g.detail << "\n";
    } else {
      any_failed = true;
      out << "[FAIL] " << g.name << ": " << g.detail << "\n";
    }
  }
  if (any_failed) return kExitGateFailure;
  if (any_inapplicable) err << "warning: some gates had insufficient data\n";
  return kExitOk;
}

}  // namespace gmhp
