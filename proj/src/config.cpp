#include "gmhp/config.hpp"

#include <set>
#include <sstream>

#include <json.hpp>

namespace gmhp {

namespace {

using nlohmann::json;

void require_keys(const json& object, const std::string& scope,
                  const std::set<std::string>& allowed) {
  for (const auto& item : object.items()) {
    if (!allowed.count(item.key())) {
      throw ConfigError(scope.empty() ? item.key() : scope + "." + item.key(),
                        "unknown field");
    }
  }
}

template <typename T>
T get_required(const json& object, const std::string& scope, const std::string& key) {
  const std::string label = scope.empty() ? key : scope + "." + key;
  if (!object.contains(key)) throw ConfigError(label, "missing");
  try {
    return object.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(label, e.what());
  }
}

template <typename T>
T get_optional(const json& object, const std::string& scope, const std::string& key,
               T fallback) {
  if (!object.contains(key)) return fallback;
  return get_required<T>(object, scope, key);
}

std::array<double, 3> get_triple(const json& object, const std::string& scope,
                                 const std::string& key) {
  const auto v = get_required<std::vector<double>>(object, scope, key);
  if (v.size() != 3)
    throw ConfigError(scope + "." + key, "expected exactly 3 entries");
  return {v[0], v[1], v[2]};
}

std::array<std::array<double, 3>, 3> get_matrix3(const json& object,
                                                 const std::string& scope,
                                                 const std::string& key) {
  const auto rows = get_required<std::vector<std::vector<double>>>(object, scope, key);
  if (rows.size() != 3)
    throw ConfigError(scope + "." + key, "expected a 3x3 matrix");
  std::array<std::array<double, 3>, 3> out{};
  for (int i = 0; i < 3; ++i) {
    if (rows[static_cast<std::size_t>(i)].size() != 3)
      throw ConfigError(scope + "." + key, "expected a 3x3 matrix");
    for (int j = 0; j < 3; ++j) out[i][j] = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return out;
}

ClassicalParams parse_classical(const json& p, const std::string& scope) {
  require_keys(p, scope, {"lambda", "theta", "beta"});
  ClassicalParams out;
  out.base_rate = get_required<double>(p, scope, "lambda");
  out.excitation = get_optional<double>(p, scope, "theta", 0.0);
  out.decay = get_optional<double>(p, scope, "beta", 1.0);
  return out;
}

ExpParams parse_bivariate_exp(const json& p, const std::string& scope) {
  require_keys(p, scope, {"alpha", "beta", "lambda0", "theta"});
  ExpParams out;
  out.baseline = get_triple(p, scope, "alpha");
  out.decay = get_triple(p, scope, "beta");
  out.initial = p.contains("lambda0") ? get_triple(p, scope, "lambda0") : out.baseline;
  out.impact = get_matrix3(p, scope, "theta");
  return out;
}

BivariateGaussParams parse_bivariate_gauss(const json& p, const std::string& scope) {
  require_keys(p, scope, {"alpha", "mu", "sigma", "beta", "a", "g_ii", "g_ci"});
  BivariateGaussParams out;
  out.base_rate = get_triple(p, scope, "alpha");
  out.base_mean = get_triple(p, scope, "mu");
  out.base_sigma = get_triple(p, scope, "sigma");
  out.decay = get_triple(p, scope, "beta");
  out.mark_scale = get_triple(p, scope, "a");
  out.impact_own = get_triple(p, scope, "g_ii");
  out.impact_common = get_triple(p, scope, "g_ci");
  return out;
}

EtasParams parse_etas(const json& p, const std::string& scope) {
  require_keys(p, scope,
               {"mu", "cutoff", "magnitudes", "weights", "K0", "alpha", "c", "p"});
  EtasParams out;
  out.background = get_required<std::vector<double>>(p, scope, "mu");
  out.cutoff = get_required<std::vector<double>>(p, scope, "cutoff");
  out.magnitudes = get_required<std::vector<std::vector<double>>>(p, scope, "magnitudes");
  out.weights = get_optional<std::vector<std::vector<double>>>(p, scope, "weights", {});
  out.productivity = get_required<std::vector<std::vector<double>>>(p, scope, "K0");
  out.magnitude_gain = get_required<std::vector<std::vector<double>>>(p, scope, "alpha");
  out.offset = get_required<std::vector<std::vector<double>>>(p, scope, "c");
  out.exponent = get_required<std::vector<std::vector<double>>>(p, scope, "p");
  return out;
}

FinanceCojumpParams parse_finance(const json& p, const std::string& scope) {
  require_keys(p, scope, {"n_assets", "marks", "theta", "decay"});
  FinanceCojumpParams out;
  out.n_assets = get_required<int>(p, scope, "n_assets");
  const auto marks = get_required<json>(p, scope, "marks");
  if (!marks.is_array()) throw ConfigError(scope + ".marks", "expected an array");
  for (std::size_t k = 0; k < marks.size(); ++k) {
    const std::string mark_scope = scope + ".marks[" + std::to_string(k) + "]";
    const auto& m = marks[k];
    if (!m.is_object()) throw ConfigError(mark_scope, "expected an object");
    require_keys(m, mark_scope, {"touched", "mu"});
    FinanceCojumpParams::MarkChannel ch;
    // Coordinates are 1-based in configs, matching the x_1..x_d CSV headers.
    for (int c : get_required<std::vector<int>>(m, mark_scope, "touched"))
      ch.touched.push_back(c - 1);
    ch.base_rate = get_required<double>(m, mark_scope, "mu");
    out.marks.push_back(std::move(ch));
  }
  out.impact = get_required<std::vector<std::vector<double>>>(p, scope, "theta");
  out.decay = get_required<std::vector<std::vector<double>>>(p, scope, "decay");
  return out;
}

ModelConfig parse_model(const json& m, const std::string& scope) {
  if (!m.is_object()) throw ConfigError(scope, "expected an object");
  require_keys(m, scope, {"preset", "params"});
  const auto preset = get_required<std::string>(m, scope, "preset");
  const json params = m.contains("params") ? m.at("params") : json::object();
  if (!params.is_object()) throw ConfigError(scope + ".params", "expected an object");
  const std::string pscope = scope + ".params";
  ModelConfig out;
  if (preset == "classical") {
    out.id = PresetId::Classical;
    out.params = parse_classical(params, pscope);
  } else if (preset == "bivariate_exp") {
    out.id = PresetId::BivariateExp;
    out.params = parse_bivariate_exp(params, pscope);
  } else if (preset == "bivariate_gauss") {
    out.id = PresetId::BivariateGauss;
    out.params = parse_bivariate_gauss(params, pscope);
  } else if (preset == "etas") {
    out.id = PresetId::Etas;
    out.params = parse_etas(params, pscope);
  } else if (preset == "finance_cojump") {
    out.id = PresetId::FinanceCojump;
    out.params = parse_finance(params, pscope);
  } else {
    throw ConfigError(scope + ".preset", "unknown preset '" + preset + "'");
  }
  return out;
}

OutputSpec parse_output(const json& o, const std::string& scope) {
  if (!o.is_object()) throw ConfigError(scope, "expected an object");
  require_keys(o, scope, {"kind", "path", "format", "per_path"});
  OutputSpec out;
  const auto kind = get_required<std::string>(o, scope, "kind");
  if (kind == "events") {
    out.kind = OutputSpec::Kind::Events;
    out.format = "csv";
  } else if (kind == "intensity_trace") {
    out.kind = OutputSpec::Kind::IntensityTrace;
    out.format = "csv";
  } else if (kind == "report") {
    out.kind = OutputSpec::Kind::Report;
    out.format = "json";
  } else {
    throw ConfigError(scope + ".kind", "unknown kind '" + kind + "'");
  }
  out.path = get_required<std::string>(o, scope, "path");
  if (out.path.empty()) throw ConfigError(scope + ".path", "must not be empty");
  const auto format = get_optional<std::string>(o, scope, "format", out.format);
  if (format != out.format)
    throw ConfigError(scope + ".format", "kind '" + kind + "' requires format '" +
                                             out.format + "'");
  out.per_path = get_optional<bool>(o, scope, "per_path", false);
  if (out.per_path && out.kind != OutputSpec::Kind::Events)
    throw ConfigError(scope + ".per_path", "only valid for events outputs");
  return out;
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError("(document)", e.what());
  }
  if (!root.is_object()) throw ConfigError("(document)", "expected a JSON object");
  require_keys(root, "",
               {"version", "model", "horizon", "max_generation", "n_paths", "seed",
                "engine", "truncation", "trace_grid", "outputs", "validate"});

  RunConfig config;
  config.version = get_required<int>(root, "", "version");
  if (config.version != 1) throw ConfigError("version", "unsupported version");

  if (!root.contains("model")) throw ConfigError("model", "missing");
  config.model = parse_model(root.at("model"), "model");

  config.horizon = get_required<double>(root, "", "horizon");
  if (!(config.horizon > 0.0)) throw ConfigError("horizon", "must be positive");
  config.max_generation = get_optional<int>(root, "", "max_generation", 30);
  if (config.max_generation < 0) throw ConfigError("max_generation", "must be nonnegative");
  config.n_paths = get_optional<int>(root, "", "n_paths", 1);
  if (config.n_paths < 1) throw ConfigError("n_paths", "must be positive");
  config.seed = get_optional<std::uint64_t>(root, "", "seed", 0);

  const auto engine = get_optional<std::string>(root, "", "engine", "cluster");
  if (engine == "cluster") {
    config.engine = RunConfig::Engine::Cluster;
  } else if (engine == "markov") {
    config.engine = RunConfig::Engine::Markov;
  } else {
    throw ConfigError("engine", "expected 'cluster' or 'markov'");
  }
  if (config.engine == RunConfig::Engine::Markov &&
      config.model.id != PresetId::BivariateExp) {
    throw ConfigError("engine", "'markov' requires the bivariate_exp model");
  }

  const auto truncation = get_optional<std::string>(root, "", "truncation", "warn");
  if (truncation == "warn") {
    config.truncation = SimOptions::TruncationPolicy::Warn;
  } else if (truncation == "error") {
    config.truncation = SimOptions::TruncationPolicy::Error;
  } else {
    throw ConfigError("truncation", "expected 'warn' or 'error'");
  }

  config.trace_grid = get_optional<int>(root, "", "trace_grid", 1000);
  if (config.trace_grid < 2) throw ConfigError("trace_grid", "must be at least 2");

  if (root.contains("outputs")) {
    const auto& outputs = root.at("outputs");
    if (!outputs.is_array()) throw ConfigError("outputs", "expected an array");
    std::set<std::string> seen;
    for (std::size_t k = 0; k < outputs.size(); ++k) {
      auto spec = parse_output(outputs[k], "outputs[" + std::to_string(k) + "]");
      if (!seen.insert(spec.path).second)
        throw ConfigError("outputs[" + std::to_string(k) + "].path",
                          "duplicate output path '" + spec.path + "'");
      config.outputs.push_back(std::move(spec));
    }
  }

  if (root.contains("validate")) {
    const auto& v = root.at("validate");
    if (!v.is_object()) throw ConfigError("validate", "expected an object");
    require_keys(v, "validate", {"ks_level", "se_units", "reference_model"});
    config.validate.ks_level = get_optional<double>(v, "validate", "ks_level", 0.01);
    if (!(config.validate.ks_level > 0.0 && config.validate.ks_level < 1.0))
      throw ConfigError("validate.ks_level", "must lie in (0,1)");
    config.validate.se_units = get_optional<double>(v, "validate", "se_units", 3.0);
    if (!(config.validate.se_units > 0.0))
      throw ConfigError("validate.se_units", "must be positive");
    if (v.contains("reference_model")) {
      config.validate.reference_model =
          parse_model(v.at("reference_model"), "validate.reference_model");
    }
  }

  return config;
}

namespace {

json model_to_json(const ModelConfig& model) {
  json params = json::object();
  switch (model.id) {
    case PresetId::Classical: {
      const auto& p = std::get<ClassicalParams>(model.params);
      params = {{"lambda", p.base_rate}, {"theta", p.excitation}, {"beta", p.decay}};
      break;
    }
    case PresetId::BivariateExp: {
      const auto& p = std::get<ExpParams>(model.params);
      params = {{"alpha", p.baseline},
                {"beta", p.decay},
                {"lambda0", p.initial},
                {"theta", p.impact}};
      break;
    }
    case PresetId::BivariateGauss: {
      const auto& p = std::get<BivariateGaussParams>(model.params);
      params = {{"alpha", p.base_rate}, {"mu", p.base_mean},
                {"sigma", p.base_sigma}, {"beta", p.decay},
                {"a", p.mark_scale},     {"g_ii", p.impact_own},
                {"g_ci", p.impact_common}};
      break;
    }
    case PresetId::Etas: {
      const auto& p = std::get<EtasParams>(model.params);
      params = {{"mu", p.background},     {"cutoff", p.cutoff},
                {"magnitudes", p.magnitudes}, {"K0", p.productivity},
                {"alpha", p.magnitude_gain},  {"c", p.offset},
                {"p", p.exponent}};
      if (!p.weights.empty()) params["weights"] = p.weights;
      break;
    }
    case PresetId::FinanceCojump: {
      const auto& p = std::get<FinanceCojumpParams>(model.params);
      json marks = json::array();
      for (const auto& m : p.marks) {
        json touched = json::array();
        for (int c : m.touched) touched.push_back(c + 1);
        marks.push_back({{"touched", touched}, {"mu", m.base_rate}});
      }
      params = {{"n_assets", p.n_assets},
                {"marks", marks},
                {"theta", p.impact},
                {"decay", p.decay}};
      break;
    }
  }
  return {{"preset", preset_name(model.id)}, {"params", params}};
}

}  // namespace

std::string serialize_run_config(const RunConfig& config) {
  json root;
  root["version"] = config.version;
  root["model"] = model_to_json(config.model);
  root["horizon"] = config.horizon;
  root["max_generation"] = config.max_generation;
  root["n_paths"] = config.n_paths;
  root["seed"] = config.seed;
  root["engine"] = config.engine == RunConfig::Engine::Markov ? "markov" : "cluster";
  root["truncation"] =
      config.truncation == SimOptions::TruncationPolicy::Error ? "error" : "warn";
  root["trace_grid"] = config.trace_grid;
  json outputs = json::array();
  for (const auto& o : config.outputs) {
    json entry;
    entry["kind"] = o.kind == OutputSpec::Kind::Events ? "events"
                    : o.kind == OutputSpec::Kind::IntensityTrace ? "intensity_trace"
                                                                 : "report";
    entry["path"] = o.path;
    entry["format"] = o.format;
    if (o.per_path) entry["per_path"] = true;
    outputs.push_back(std::move(entry));
  }
  root["outputs"] = std::move(outputs);
  json validate;
  validate["ks_level"] = config.validate.ks_level;
  validate["se_units"] = config.validate.se_units;
  if (config.validate.reference_model)
    validate["reference_model"] = model_to_json(*config.validate.reference_model);
  root["validate"] = std::move(validate);
  return root.dump(2) + "\n";
}

KernelSpec build_kernel(const ModelConfig& model) {
  switch (model.id) {
    case PresetId::Classical:
      return build_classical(std::get<ClassicalParams>(model.params));
    case PresetId::BivariateExp:
      return build_bivariate_exp(std::get<ExpParams>(model.params));
    case PresetId::BivariateGauss:
      return build_bivariate_gauss(std::get<BivariateGaussParams>(model.params));
    case PresetId::Etas:
      return build_etas(std::get<EtasParams>(model.params));
    case PresetId::FinanceCojump:
      return build_finance_cojump(std::get<FinanceCojumpParams>(model.params));
  }
  throw std::logic_error("build_kernel: bad preset id");
}

std::string preset_name(PresetId id) {
  switch (id) {
    case PresetId::Classical:
      return "classical";
    case PresetId::BivariateExp:
      return "bivariate_exp";
    case PresetId::BivariateGauss:
      return "bivariate_gauss";
    case PresetId::Etas:
      return "etas";
    case PresetId::FinanceCojump:
      return "finance_cojump";
  }
  return "unknown";
}

}  // namespace gmhp
