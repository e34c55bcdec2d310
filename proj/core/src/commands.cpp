#include "spreg/commands.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "spreg/diagnostics.hpp"
#include "spreg/errors.hpp"
#include "spreg/stats.hpp"
#include "spreg/version.hpp"

namespace spreg {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

ojson provenance(const RunConfig& cfg) {
  return ojson{{"tool", "spreg"},
               {"version", kVersion},
               {"seed", cfg.seed},
               {"config_hash", cfg.hash},
               {"config", ojson::parse(cfg.canonical)}};
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write '" + path.string() + "'");
  return os;
}

void write_manifest(const fs::path& out, const RunConfig& cfg, Command cmd, const std::vector<std::string>& files) {
  ojson j{{"command", to_string(cmd)}, {"provenance", provenance(cfg)}, {"files", files}};
  open_out(out / "manifest.json") << j.dump(2) << '\n';
}

void prepare_dir(const fs::path& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw ConfigError("cannot create output directory '" + out.string() + "': " + ec.message());
}

std::string sig6(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

const ModelSpec& require_model(const RunConfig& cfg) {
  if (!cfg.model) throw ConfigError("config has no model section");
  return *cfg.model;
}

DataBlock load_data(const RunConfig& cfg) {
  if (cfg.data.empty()) throw ConfigError("config has no data section");
  if (cfg.schema.response.empty()) throw ConfigError("data.response is required");
  if (!fs::exists(cfg.data)) throw ConfigError("data file not found: '" + cfg.data.string() + "'");
  return read_csv(cfg.data, cfg.schema);
}

ojson model_json(const ModelSpec& m) {
  ojson params = ojson::array();
  for (std::size_t k = 0; k < m.blocks(); ++k) {
    params.push_back({{"name", m.predictors()[k].parameter},
                      {"response", m.family().response(k).name()},
                      {"coefficients", m.predictors()[k].coefficient_names()}});
  }
  return ojson{{"family", to_string(m.family().kind())},
               {"variance", to_string(m.family().nb_variance())},
               {"parameters", params}};
}

void print_table(std::ostream& log, const std::vector<CoefSummary>& rows, bool exp_means) {
  log << std::left << std::setw(10) << "parameter" << std::setw(16) << "coefficient" << std::right << std::setw(12)
      << "estimate" << std::setw(12) << "lower" << std::setw(12) << "upper";
  if (exp_means) log << std::setw(12) << "exp";
  log << '\n';
  for (const CoefSummary& r : rows) {
    log << std::left << std::setw(10) << r.parameter << std::setw(16) << r.name << std::right << std::setw(12)
        << sig6(r.mean) << std::setw(12) << sig6(r.lower) << std::setw(12) << sig6(r.upper);
    if (exp_means) log << std::setw(12) << sig6(r.exp_mean);
    log << '\n';
  }
}

void write_chain_csv(const fs::path& path, const RunConfig& cfg, const Chain& chain) {
  std::ofstream os = open_out(path);
  os << "# seed=" << cfg.seed << " config_hash=" << cfg.hash << '\n';
  bool first = true;
  for (std::size_t b = 0; b < chain.parameters.size(); ++b) {
    for (const std::string& n : chain.coefficient_names[b]) {
      os << (first ? "" : ",") << '"' << chain.parameters[b] << ':' << n << '"';
      first = false;
    }
  }
  os << ",log_likelihood\n";
  os.precision(17);
  for (std::size_t s = 0; s < chain.size(); ++s) {
    first = true;
    for (const Eigen::MatrixXd& d : chain.draws) {
      for (Eigen::Index j = 0; j < d.cols(); ++j) {
        os << (first ? "" : ",") << d(static_cast<Eigen::Index>(s), j);
        first = false;
      }
    }
    os << ',' << chain.log_likelihood[s] << '\n';
  }
}

std::vector<CoefSummary> mle_rows(const ModelSpec& model, const MleResult& mle, double level) {
  const std::vector<Eigen::VectorXd> se = mle.standard_errors();
  const double z = std_normal_quantile(0.5 * (1.0 + level));
  std::vector<CoefSummary> rows;
  for (std::size_t b = 0; b < model.blocks(); ++b) {
    const std::vector<std::string> names = model.predictors()[b].coefficient_names();
    for (std::size_t j = 0; j < names.size(); ++j) {
      const double est = mle.coefficients[b].beta[static_cast<Eigen::Index>(j)];
      const double s = se[b][static_cast<Eigen::Index>(j)];
      rows.push_back({model.predictors()[b].parameter, names[j], est, est - z * s, est + z * s, std::exp(est)});
    }
  }
  return rows;
}

}  // namespace

void cmd_fit(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
  const ModelSpec& model = require_model(cfg);
  const DataBlock data = load_data(cfg);
  const BoundModel bm(model, data);
  prepare_dir(out);

  ojson summary;
  summary["provenance"] = provenance(cfg);
  summary["data"] = fs::absolute(cfg.data).lexically_normal().string();
  summary["n"] = data.n();
  summary["model"] = model_json(model);
  std::vector<std::string> files{"summary.json"};
  std::vector<CoefSummary> rows;
  if (cfg.method == Method::mle) {
    const MleResult mle = fit_mle(bm, std::nullopt, cfg.mle);
    rows = mle_rows(model, mle, 0.95);
    summary["method"] = "mle";
    summary["mle"] = {{"converged", mle.converged},
                      {"iterations", mle.iterations},
                      {"gradient_norm", mle.gradient_norm},
                      {"log_likelihood", mle.log_likelihood}};
  } else {
    const Chain chain = run_chain(bm, cfg.chain);
    rows = summarize(chain, 0.95).rows;
    const DicResult d = dic(chain, bm);
    summary["method"] = "mcmc";
    ojson acc = ojson::array();
    for (std::size_t b = 0; b < chain.parameters.size(); ++b) acc.push_back(chain.acceptance_rate(b));
    summary["sampler"] = {{"iterations", cfg.chain.iterations},
                          {"burnin", cfg.chain.burnin},
                          {"thin", cfg.chain.thin},
                          {"stored", chain.size()},
                          {"acceptance", acc},
                          {"fallback_proposals", chain.fallback_proposals}};
    summary["dic"] = {{"mean_deviance", d.mean_deviance},
                      {"deviance_at_mean", d.deviance_at_mean},
                      {"pd", d.effective_parameters},
                      {"dic", d.dic}};
    if (cfg.write_chain) {
      write_chain_csv(out / "chain.csv", cfg, chain);
      files.push_back("chain.csv");
    }
  }
  ojson coefs = ojson::array();
  for (const CoefSummary& r : rows) {
    ojson c{{"parameter", r.parameter}, {"name", r.name}, {"mean", r.mean}, {"lower", r.lower}, {"upper", r.upper}};
    if (cfg.exp_means) c["exp_mean"] = r.exp_mean;
    coefs.push_back(std::move(c));
  }
  summary["interval_level"] = 0.95;
  summary["coefficients"] = std::move(coefs);
  open_out(out / "summary.json") << summary.dump(2) << '\n';
  files.push_back("manifest.json");
  write_manifest(out, cfg, Command::fit, files);

  print_table(log, rows, cfg.exp_means);
  if (summary.contains("dic")) log << "DIC " << sig6(summary["dic"]["dic"].get<double>()) << '\n';
}

void cmd_simulate(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
  if (cfg.study.empty()) throw ConfigError("simulate needs a study (coverage, dic_selection or gpd_tail)");
  prepare_dir(out);
  ExperimentReport report;
  if (cfg.study == "coverage") {
    report = run_coverage_study(cfg.scenario, cfg.threads);
  } else if (cfg.study == "dic_selection") {
    report = run_dic_selection_study(cfg.dic_selection, cfg.threads);
  } else {
    report = run_gpd_tail_study(cfg.gpd_tail, cfg.threads);
  }
  {
    std::ofstream os = open_out(out / "report.json");
    write_report_json(os, report);
  }
  {
    std::ofstream os = open_out(out / "report.csv");
    write_report_csv(os, report);
  }
  write_manifest(out, cfg, Command::simulate, {"report.json", "report.csv", "manifest.json"});

  log << report.study << ": " << report.effective << '/' << report.replications << " replications ("
      << report.divergent << " divergent)\n";
  for (const CoefficientReport& c : report.coefficients) {
    log << "  " << c.name << " bias " << sig6(c.bias) << " cov80 " << sig6(c.coverage80) << " cov95 "
        << sig6(c.coverage95) << '\n';
  }
  for (const ThresholdRate& t : report.selection) {
    log << "  threshold " << t.threshold << " rate " << sig6(t.rate) << " +/- " << sig6(t.half_width) << '\n';
  }
  for (const auto& [k, v] : report.metrics) log << "  " << k << ' ' << sig6(v) << '\n';
}

LoadedBundle load_bundle(const fs::path& dir) {
  const fs::path summary_path = dir / "summary.json";
  std::ifstream in(summary_path, std::ios::binary);
  if (!in) throw ConfigError("not a fit bundle (missing " + summary_path.string() + ")");
  ojson s;
  try {
    s = ojson::parse(in);
  } catch (const ojson::exception& e) {
    throw ConfigError("cannot parse " + summary_path.string() + ": " + e.what());
  }
  try {
    RunConfig cfg = parse_config(s.at("provenance").at("config").dump());
    const ModelSpec model = require_model(cfg);
    const fs::path data = s.at("data").get<std::string>();

    const fs::path chain_path = dir / "chain.csv";
    if (s.at("method") == "mcmc" && fs::exists(chain_path)) {
      const Table t = read_table(chain_path);
      Chain c;
      c.settings = cfg.chain;
      Eigen::Index col = 0;
      for (const PredictorSpec& p : model.predictors()) {
        c.parameters.push_back(p.parameter);
        c.coefficient_names.push_back(p.coefficient_names());
        const auto w = static_cast<Eigen::Index>(p.size());
        c.draws.push_back(t.values.middleCols(col, w));
        col += w;
        c.accepted.push_back(0);
        c.proposed.push_back(0);
      }
      if (col + 1 != t.values.cols()) throw ConfigError(chain_path.string() + " does not match the model");
      const Eigen::VectorXd ll = t.values.col(col);
      c.log_likelihood.assign(ll.data(), ll.data() + ll.size());
      return {std::move(cfg), FitResult::from_chain(model, std::move(c)), data};
    }

    Coefficients point;
    std::size_t row = 0;
    const ojson& rows = s.at("coefficients");
    for (const PredictorSpec& p : model.predictors()) {
      CoefficientBlock b{p.parameter, Eigen::VectorXd(static_cast<Eigen::Index>(p.size()))};
      for (Eigen::Index j = 0; j < b.beta.size(); ++j) b.beta[j] = rows.at(row++).at("mean").get<double>();
      point.push_back(std::move(b));
    }
    FitResult fit{model, std::move(point), std::nullopt, std::nullopt};
    return {std::move(cfg), std::move(fit), data};
  } catch (const ojson::exception& e) {
    throw ConfigError("malformed fit bundle " + dir.string() + ": " + e.what());
  }
}

void cmd_diagnose(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
  if (cfg.fits.empty()) throw ConfigError("diagnose needs 'fits' (one bundle, or two with ratios)");
  if (cfg.ratios && cfg.fits.size() != 2) throw ConfigError("ratio mode needs exactly two fit bundles");
  const LoadedBundle a = load_bundle(cfg.fits[0]);
  RunConfig data_cfg = a.config;
  data_cfg.data = cfg.data.empty() ? a.data : cfg.data;
  if (!cfg.schema.response.empty()) data_cfg.schema = cfg.schema;
  const DataBlock data = load_data(data_cfg);
  prepare_dir(out);

  const std::uint64_t rqr_seed = derive_seed(cfg.seed, 0);
  const RqrSet r = rqr(a.fit, data, rqr_seed);
  const AdStatistic ad = ad_statistic(r);
  {
    std::ofstream os = open_out(out / "qq.csv");
    write_qq_csv(os, qq_export(r));
  }
  std::vector<std::string> files{"qq.csv", "diagnostics.json"};
  ojson d{{"provenance", provenance(cfg)},
          {"n", data.n()},
          {"rqr_seed", rqr_seed},
          {"rqr_clip", r.clip},
          {"ad_statistic", ad.a2},
          {"ks_distance", ks_distance_std_normal(r.residuals)}};
  if (cfg.ratios) {
    const LoadedBundle b = load_bundle(cfg.fits[1]);
    if (!a.fit.chain || !b.fit.chain) throw ConfigError("ratio mode needs bundles with chain.csv");
    const std::vector<WidthRatio> w = ci_width_ratio(a.fit, b.fit, data, cfg.predict.p, cfg.level);
    std::ofstream os = open_out(out / "ratios.csv");
    write_ratio_csv(os, w);
    long degenerate = 0;
    std::vector<double> ratios;
    for (const WidthRatio& x : w) {
      degenerate += x.degenerate ? 1 : 0;
      ratios.push_back(x.ratio);
    }
    d["ratios"] = {{"p", cfg.predict.p},
                   {"level", cfg.level},
                   {"median", empirical_quantile(ratios, 0.5)},
                   {"degenerate", degenerate}};
    files.push_back("ratios.csv");
  }
  open_out(out / "diagnostics.json") << d.dump(2) << '\n';
  files.push_back("manifest.json");
  write_manifest(out, cfg, Command::diagnose, files);
  log << "n " << data.n() << "  AD " << sig6(ad.a2) << "  KS " << sig6(d["ks_distance"].get<double>()) << '\n';
}

void cmd_predict(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
  if (cfg.fits.size() != 1) throw ConfigError("predict needs exactly one fit bundle in 'fits'");
  if (cfg.data.empty()) throw ConfigError("predict needs a data section with the new covariates");
  const LoadedBundle b = load_bundle(cfg.fits[0]);
  std::vector<std::string> cov;
  for (const PredictorSpec& p : b.fit.model.predictors()) {
    for (const std::string& c : p.covariates) {
      if (std::find(cov.begin(), cov.end(), c) == cov.end()) cov.push_back(c);
    }
  }
  if (!fs::exists(cfg.data)) throw ConfigError("data file not found: '" + cfg.data.string() + "'");
  const DataBlock nd = covariate_block(read_table(cfg.data, CsvSchema{cov}), cov);
  const Eigen::MatrixXd pred = predict(b.fit, nd, cfg.predict);
  prepare_dir(out);
  std::ofstream os = open_out(out / "predictions.csv");
  os << "obs_id";
  if (cfg.predict.target == PredictTarget::parameters) {
    for (const PredictorSpec& p : b.fit.model.predictors()) os << ',' << p.parameter;
  } else if (cfg.predict.target == PredictTarget::mean) {
    os << ",mean";
  } else {
    os << ",quantile";
  }
  os << '\n';
  os.precision(17);
  for (Eigen::Index i = 0; i < pred.rows(); ++i) {
    os << i;
    for (Eigen::Index j = 0; j < pred.cols(); ++j) os << ',' << pred(i, j);
    os << '\n';
  }
  write_manifest(out, cfg, Command::predict, {"predictions.csv", "manifest.json"});
  log << "wrote " << pred.rows() << " predictions\n";
}

int run_command(Command command, const CommandOptions& options, std::ostream& log, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = load_config(options.config, options.seed);
    if (cfg.command && *cfg.command != command) {
      throw ConfigError("config is for '" + to_string(*cfg.command) + "', not '" + to_string(command) + "'");
    }
    if (options.threads > 0) cfg.threads = options.threads;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  try {
    switch (command) {
      case Command::fit: cmd_fit(cfg, options.out, log); break;
      case Command::simulate: cmd_simulate(cfg, options.out, log); break;
      case Command::diagnose: cmd_diagnose(cfg, options.out, log); break;
      case Command::predict: cmd_predict(cfg, options.out, log); break;
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const DomainError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace spreg
