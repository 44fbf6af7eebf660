#ifndef GMHP_CONFIG_HPP
#define GMHP_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "gmhp/cluster_sim.hpp"
#include "gmhp/kernel.hpp"
#include "gmhp/presets.hpp"

namespace gmhp {

// Configuration problem tied to a named field; maps to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error("config field '" + field + "': " + what),
        field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

using ModelParams = std::variant<ClassicalParams, ExpParams, BivariateGaussParams,
                                 EtasParams, FinanceCojumpParams>;

enum class PresetId { Classical, BivariateExp, BivariateGauss, Etas, FinanceCojump };

struct ModelConfig {
  PresetId id = PresetId::Classical;
  ModelParams params;
};

struct OutputSpec {
  enum class Kind { Events, IntensityTrace, Report };
  Kind kind = Kind::Events;
  std::string path;
  std::string format;    // "csv" or "json"; defaulted by kind
  bool per_path = false; // events only: one file per path
};

struct ValidateOptions {
  double ks_level = 0.01;
  double se_units = 3.0;
  // Kernel the diagnostics are evaluated against; simulated model by default.
  std::optional<ModelConfig> reference_model;
};

struct RunConfig {
  int version = 1;
  ModelConfig model;
  double horizon = 1.0;
  int max_generation = 30;
  int n_paths = 1;
  std::uint64_t seed = 0;
  enum class Engine { Cluster, Markov } engine = Engine::Cluster;
  SimOptions::TruncationPolicy truncation = SimOptions::TruncationPolicy::Warn;
  int trace_grid = 1000;
  std::vector<OutputSpec> outputs;
  ValidateOptions validate;
};

// Strict parser: unknown fields are rejected, `version` is required, and the
// engine/model compatibility rule is enforced.
RunConfig parse_run_config(const std::string& text);
std::string serialize_run_config(const RunConfig& config);

KernelSpec build_kernel(const ModelConfig& model);

std::string preset_name(PresetId id);

}  // namespace gmhp

#endif
