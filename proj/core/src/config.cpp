#include "spreg/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "spreg/errors.hpp"

namespace spreg {
namespace {

using json = nlohmann::json;

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items()) {
    if (!ok.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
  }
}

template <class T>
T get(const json& j, const char* key, const std::string& where, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

std::vector<std::string> get_strings(const json& j, const char* key, const std::string& where) {
  return get<std::vector<std::string>>(j, key, where, {});
}

Eigen::VectorXd get_vector(const json& j, const char* key, const std::string& where, Eigen::VectorXd fallback) {
  if (!j.contains(key)) return fallback;
  const auto v = get<std::vector<double>>(j, key, where, {});
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

ResponseFunction default_response(FamilyKind kind, const std::string& parameter) {
  if (parameter == "pi") return ResponseFunction::logistic();
  if (kind == FamilyKind::normal_ls && parameter == "mu") return ResponseFunction::identity();
  return ResponseFunction::exponential();
}

ChainSettings parse_chain(const json& j, const std::string& where, ChainSettings c) {
  c.iterations = get(j, "iterations", where, c.iterations);
  c.burnin = get(j, "burnin", where, c.burnin);
  c.thin = get(j, "thin", where, c.thin);
  c.start_at_mode = get(j, "start_at_mode", where, c.start_at_mode);
  c.validate();
  return c;
}

ModelSpec parse_model(const json& m) {
  check_keys(m, "model", {"family", "variance", "parameters"});
  if (!m.contains("family")) throw ConfigError("model.family is required");
  const FamilyKind kind = parse_family(get<std::string>(m, "family", "model", ""));
  const NbVariance var = parse_nb_variance(get<std::string>(m, "variance", "model", "quadratic"));
  const std::vector<std::string> names = parameter_names(kind);
  const json params = m.value("parameters", json::object());
  if (!params.is_object()) throw ConfigError("model.parameters must be an object");
  for (const auto& [k, v] : params.items()) {
    if (std::find(names.begin(), names.end(), k) == names.end()) {
      throw ConfigError("unknown parameter '" + k + "' for family " + to_string(kind));
    }
  }
  std::vector<ResponseFunction> responses;
  std::vector<PredictorSpec> predictors;
  std::vector<PriorSpec> priors;
  for (std::size_t k = 0; k < names.size(); ++k) {
    const std::string where = "model.parameters." + names[k];
    const json p = params.value(names[k], json::object());
    check_keys(p, where, {"response", "covariates", "intercept", "prior_sd"});
    responses.push_back(p.contains("response")
                            ? ResponseFunction::parse(get<std::string>(p, "response", where, ""))
                            : default_response(kind, names[k]));
    predictors.push_back({names[k], get(p, "intercept", where, true), get_strings(p, "covariates", where)});
    if (predictors.back().size() == 0) throw ConfigError(where + " has neither intercept nor covariates");
    priors.push_back(p.contains("prior_sd") ? PriorSpec::normal(get(p, "prior_sd", where, 0.0)) : PriorSpec::flat());
  }
  return ModelSpec(FamilySpec::make(kind, responses, var), predictors, priors);
}

void parse_scenario(const json& s, RunConfig& cfg) {
  check_keys(s, "scenario",
             {"dgp", "coefficients", "n", "replications", "iterations", "burnin", "thin", "start_at_mode", "alternative",
              "thresholds", "sigma_coefficients", "gamma_coefficients", "exp_gamma_coefficients", "softplus_a", "p",
              "level", "top_fraction"});
  const std::string w = "scenario";
  if (cfg.study == "coverage" || cfg.study == "dic_selection") {
    ScenarioSpec& sc = cfg.scenario;
    sc.dgp = ResponseFunction::parse(get<std::string>(s, "dgp", w, sc.dgp.name()));
    sc.coefficients = get_vector(s, "coefficients", w, sc.coefficients);
    sc.n = get(s, "n", w, sc.n);
    sc.replications = get(s, "replications", w, sc.replications);
    sc.chain = parse_chain(s, w, sc.chain);
    sc.seed = cfg.seed;
    sc.validate();
    if (cfg.study == "dic_selection") {
      DicSelectionSpec& d = cfg.dic_selection;
      d.scenario = sc;
      d.alternative = ResponseFunction::parse(get<std::string>(s, "alternative", w, d.alternative.name()));
      d.thresholds = get(s, "thresholds", w, d.thresholds);
      d.validate();
    }
  } else if (cfg.study == "gpd_tail") {
    GpdTailSpec& g = cfg.gpd_tail;
    g.n = get(s, "n", w, g.n);
    g.replications = get(s, "replications", w, g.replications);
    g.sigma_coefficients = get_vector(s, "sigma_coefficients", w, g.sigma_coefficients);
    g.gamma_coefficients = get_vector(s, "gamma_coefficients", w, g.gamma_coefficients);
    g.exp_gamma_coefficients = get_vector(s, "exp_gamma_coefficients", w, g.exp_gamma_coefficients);
    g.softplus_a = get(s, "softplus_a", w, g.softplus_a);
    g.p = get(s, "p", w, g.p);
    g.level = get(s, "level", w, g.level);
    g.top_fraction = get(s, "top_fraction", w, g.top_fraction);
    g.chain = parse_chain(s, w, g.chain);
    g.seed = cfg.seed;
    g.validate();
  } else {
    throw ConfigError("unknown study '" + cfg.study + "' (expected coverage, dic_selection or gpd_tail)");
  }
}

}  // namespace

std::string to_string(Command c) {
  switch (c) {
    case Command::fit: return "fit";
    case Command::simulate: return "simulate";
    case Command::diagnose: return "diagnose";
    case Command::predict: return "predict";
  }
  return "?";
}

Command parse_command(std::string_view name) {
  if (name == "fit") return Command::fit;
  if (name == "simulate") return Command::simulate;
  if (name == "diagnose") return Command::diagnose;
  if (name == "predict") return Command::predict;
  throw ConfigError("unknown command '" + std::string(name) + "'");
}

RunConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir,
                       std::optional<std::uint64_t> seed_override) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, "config",
             {"command", "seed", "threads", "data", "model", "inference", "output", "study", "scenario", "fits",
              "target", "p", "level", "ratios"});
  if (seed_override) j["seed"] = *seed_override;

  RunConfig cfg;
  try {
    if (j.contains("command")) cfg.command = parse_command(get<std::string>(j, "command", "config", ""));
    cfg.seed = get<std::uint64_t>(j, "seed", "config", cfg.seed);
    cfg.threads = get(j, "threads", "config", cfg.threads);
    if (cfg.threads < 1) throw ConfigError("threads must be >= 1");
    auto resolve = [&](const std::string& p) {
      const std::filesystem::path path(p);
      return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
    };

    if (j.contains("data")) {
      const json& d = j["data"];
      check_keys(d, "data", {"path", "response", "covariates", "threshold"});
      if (!d.contains("path")) throw ConfigError("data.path is required");
      cfg.data = resolve(get<std::string>(d, "path", "data", ""));
      cfg.schema.response = get<std::string>(d, "response", "data", "");
      cfg.schema.covariates = get_strings(d, "covariates", "data");
      if (d.contains("threshold")) cfg.schema.threshold = get(d, "threshold", "data", 0.0);
    }
    if (j.contains("model")) {
      cfg.model = parse_model(j["model"]);
      if (cfg.schema.covariates.empty()) {
        std::vector<std::string> cov;
        for (const PredictorSpec& p : cfg.model->predictors()) {
          for (const std::string& c : p.covariates) {
            if (std::find(cov.begin(), cov.end(), c) == cov.end()) cov.push_back(c);
          }
        }
        cfg.schema.covariates = cov;
      }
    }
    if (j.contains("inference")) {
      const json& inf = j["inference"];
      check_keys(inf, "inference",
                 {"method", "iterations", "burnin", "thin", "start_at_mode", "tolerance", "max_iterations"});
      const std::string m = get<std::string>(inf, "method", "inference", "mcmc");
      if (m == "mcmc") {
        cfg.method = Method::mcmc;
      } else if (m == "mle") {
        cfg.method = Method::mle;
      } else {
        throw ConfigError("inference.method must be 'mcmc' or 'mle', got '" + m + "'");
      }
      cfg.chain = parse_chain(inf, "inference", cfg.chain);
      cfg.mle.gradient_tolerance = get(inf, "tolerance", "inference", cfg.mle.gradient_tolerance);
      cfg.mle.max_iterations = get(inf, "max_iterations", "inference", cfg.mle.max_iterations);
    }
    cfg.chain.seed = cfg.seed;
    if (j.contains("output")) {
      const json& o = j["output"];
      check_keys(o, "output", {"chain", "exp_means"});
      cfg.write_chain = get(o, "chain", "output", cfg.write_chain);
      cfg.exp_means = get(o, "exp_means", "output", cfg.exp_means);
    }
    cfg.study = get<std::string>(j, "study", "config", "");
    if (!cfg.study.empty() || j.contains("scenario")) {
      if (cfg.study.empty()) throw ConfigError("scenario given without a study name");
      parse_scenario(j.value("scenario", json::object()), cfg);
    }
    for (const std::string& f : get_strings(j, "fits", "config")) cfg.fits.push_back(resolve(f));
    const std::string target = get<std::string>(j, "target", "config", "parameters");
    if (target == "parameters") {
      cfg.predict.target = PredictTarget::parameters;
    } else if (target == "mean") {
      cfg.predict.target = PredictTarget::mean;
    } else if (target == "quantile") {
      cfg.predict.target = PredictTarget::quantile;
    } else {
      throw ConfigError("target must be parameters, mean or quantile, got '" + target + "'");
    }
    cfg.predict.p = get(j, "p", "config", cfg.predict.p);
    if (!(cfg.predict.p > 0.0 && cfg.predict.p < 1.0)) throw ConfigError("p must lie in (0, 1)");
    cfg.ratios = get(j, "ratios", "config", cfg.ratios);
    cfg.level = get(j, "level", "config", cfg.level);
    if (!(cfg.level > 0.0 && cfg.level < 1.0)) throw ConfigError("level must lie in (0, 1)");
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }

  cfg.canonical = j.dump();
  cfg.hash = hex64(fnv1a64(cfg.canonical));
  return cfg;
}

RunConfig load_config(const std::filesystem::path& file, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + file.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), file.parent_path(), seed_override);
}

}  // namespace spreg
