#include "dwreg/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "dwreg/csv.hpp"
#include "dwreg/diagnostics.hpp"
#include "dwreg/error.hpp"
#include "dwreg/regression.hpp"
#include "dwreg/serialization.hpp"
#include "dwreg/simulation.hpp"

namespace dwreg::cli {

namespace {

enum class Format { Json, Csv, Text };

using Cell = std::variant<std::string, double, std::int64_t, bool>;

struct Table {
  std::string title;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct Report {
  Json json;
  std::vector<Table> tables;
  /// free-form lines shown above the tables in text output
  std::vector<std::string> notes;
};

struct DataOptions {
  std::string input;
  std::string response;
  std::vector<std::string> covariates;
  bool no_intercept = false;
};

struct TruncationOptions {
  double term_tolerance = TruncationPolicy{}.term_tolerance;
  std::size_t max_terms = TruncationPolicy{}.max_terms;

  TruncationPolicy policy() const {
    TruncationPolicy p{term_tolerance, max_terms};
    p.validate();
    return p;
  }
};

struct Options {
  std::string format = "json";
  std::string output;

  DataOptions data;
  TruncationOptions truncation;

  std::vector<std::string> models{"dw"};
  std::string model = "dw";
  std::optional<std::uint64_t> seed;

  std::size_t groups = 10;
  std::size_t envelope_replicates = 99;
  double band_level = 0.95;
  std::int64_t tail_threshold = 0;

  bool table1 = false;
  bool map = false;
  std::size_t replicates = 200;
  std::size_t n_obs = 300;
  std::size_t threads = 1;
  std::vector<double> q_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<double> beta_grid{0.5, 1.0, 1.3, 1.6, 2.0, 2.5, 5.0};
  std::size_t n_per_cell = 100000;

  std::string model_file;
  std::optional<std::string> predict_model;
  std::vector<double> quantiles{0.25, 0.5, 0.75};
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Format parse_format(const std::string& text) {
  if (text == "json") return Format::Json;
  if (text == "csv") return Format::Csv;
  return Format::Text;
}

std::string shortest(double value) {
  if (!std::isfinite(value)) return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  (void)ec;
  return {buffer, end};
}

std::string render(const Cell& cell, Format format) {
  return std::visit(
      [format](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) {
          if (format == Format::Csv && v.find_first_of(",\"\n") != std::string::npos) {
            std::string quoted = "\"";
            for (char c : v) quoted += (c == '"') ? std::string("\"\"") : std::string(1, c);
            return quoted + "\"";
          }
          return v;
        } else if constexpr (std::is_same_v<T, double>) {
          if (format == Format::Csv) return shortest(v);
          if (!std::isfinite(v)) return shortest(v);
          char buffer[64];
          std::snprintf(buffer, sizeof buffer, "%.7g", v);
          return buffer;
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else {
          return std::to_string(v);
        }
      },
      cell);
}

void write_report(const Report& report, Format format, std::ostream& out) {
  if (format == Format::Json) {
    out << dump_document(report.json);
    return;
  }
  if (format == Format::Text) {
    for (const auto& note : report.notes) out << note << '\n';
    if (!report.notes.empty()) out << '\n';
  }
  bool first = true;
  for (const auto& table : report.tables) {
    if (!first) out << '\n';
    first = false;
    if (format == Format::Csv) {
      out << "# " << table.title << '\n';
      for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
      out << '\n';
      for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << render(row[c], format);
        out << '\n';
      }
      continue;
    }
    std::vector<std::vector<std::string>> cells;
    std::vector<std::size_t> widths(table.columns.size());
    for (std::size_t c = 0; c < table.columns.size(); ++c) widths[c] = table.columns[c].size();
    for (const auto& row : table.rows) {
      auto& rendered = cells.emplace_back();
      for (std::size_t c = 0; c < row.size(); ++c) {
        rendered.push_back(render(row[c], format));
        widths[c] = std::max(widths[c], rendered.back().size());
      }
    }
    out << table.title << '\n';
    auto line = [&](const std::vector<std::string>& values) {
      for (std::size_t c = 0; c < values.size(); ++c) {
        out << (c ? "  " : "") << std::setw(static_cast<int>(widths[c])) << (c ? std::right : std::left)
            << values[c];
      }
      out << '\n';
    };
    line(table.columns);
    for (const auto& row : cells) line(row);
  }
}

Dataset load_dataset(const DataOptions& options) {
  for (const auto& name : options.covariates) {
    if (name == options.response) {
      throw UsageError("response column '" + options.response + "' is also listed as a covariate");
    }
  }
  return ingest_csv(options.input, options.response, options.covariates, !options.no_intercept);
}

std::unique_ptr<CountRegressionFit> fit_model(ModelKind kind, const Dataset& data, const TruncationPolicy& policy) {
  switch (kind) {
    case ModelKind::DiscreteWeibull: return std::make_unique<DWRegressionFit>(fit_dw_regression(data, {}, policy));
    case ModelKind::Poisson: return std::make_unique<PoissonRegressionFit>(fit_poisson_glm(data));
    case ModelKind::NegativeBinomial: return std::make_unique<NBRegressionFit>(fit_nb_regression(data));
  }
  throw std::logic_error("unknown model");
}

Json data_summary(const DataOptions& options, const Dataset& data) {
  return {{"input", options.input},
          {"response", options.response},
          {"covariates", options.covariates},
          {"intercept", data.has_intercept()},
          {"n_obs", data.size()}};
}

void add_fit_tables(const CountRegressionFit& fit, Report& report) {
  const FitResult& result = fit.result();
  const std::string key(model_key(fit.kind()));
  Table coefficients{"coefficients (" + key + ")", {"parameter", "estimate", "std_error"}, {}};
  for (std::size_t j = 0; j < result.n_params; ++j) {
    coefficients.rows.push_back(
        {result.parameter_names[j], result.estimates(static_cast<Eigen::Index>(j)), result.standard_error(j)});
  }
  report.tables.push_back(std::move(coefficients));
  if (const auto* dw = dynamic_cast<const DWRegressionFit*>(&fit)) {
    const MedianInterpretation view = interpret_coefficients(*dw);
    Table median{"median-scale effects (dw)", {"term", "effect"}, {}};
    if (dw->has_intercept()) median.rows.push_back({std::string(kInterceptName), view.intercept_term});
    for (const auto& effect : view.effects) median.rows.push_back({effect.name, effect.effect});
    report.tables.push_back(std::move(median));
  }
  Table summary{"fit summary (" + key + ")", {"statistic", "value"}, {}};
  summary.rows.push_back({std::string("loglik"), result.loglik});
  summary.rows.push_back({std::string("aic"), result.aic});
  summary.rows.push_back({std::string("bic"), result.bic});
  summary.rows.push_back({std::string("n_obs"), static_cast<std::int64_t>(result.n_obs)});
  summary.rows.push_back({std::string("converged"), result.converged});
  if (const auto* dw = dynamic_cast<const DWRegressionFit*>(&fit)) summary.rows.push_back({std::string("beta"), dw->beta()});
  if (const auto* nb = dynamic_cast<const NBRegressionFit*>(&fit)) {
    summary.rows.push_back({std::string("k"), nb->k()});
    summary.rows.push_back({std::string("at_boundary"), nb->at_boundary()});
  }
  report.tables.push_back(std::move(summary));
}

Report run_fit(const Options& options) {
  const Dataset data = load_dataset(options.data);
  const TruncationPolicy policy = options.truncation.policy();
  Report report;
  report.json["command"] = "fit";
  report.json["data"] = data_summary(options.data, data);
  Json fits = Json::array();
  for (const auto& key : options.models) {
    const auto fit = fit_model(parse_model_key(key), data, policy);
    fits.push_back(to_json(*fit));
    add_fit_tables(*fit, report);
  }
  report.json["fits"] = fits;
  report.notes.push_back("input: " + options.data.input + " (n = " + std::to_string(data.size()) + ")");
  return report;
}

Table lr_table(const std::string& title, const LikelihoodRatioTest& test) {
  return {title,
          {"statistic", "df", "p_value"},
          {{test.statistic, static_cast<std::int64_t>(test.df), test.p_value}}};
}

Report run_compare(const Options& options) {
  const Dataset data = load_dataset(options.data);
  const TruncationPolicy policy = options.truncation.policy();
  Report report;
  report.json["command"] = "compare";
  report.json["data"] = data_summary(options.data, data);

  std::vector<std::unique_ptr<CountRegressionFit>> fits;
  for (ModelKind kind : {ModelKind::Poisson, ModelKind::NegativeBinomial, ModelKind::DiscreteWeibull}) {
    fits.push_back(fit_model(kind, data, policy));
  }
  Table comparison{"model comparison", {"model", "n_params", "loglik", "aic", "bic"}, {}};
  Json rows = Json::array();
  Json fit_nodes = Json::array();
  for (const auto& fit : fits) {
    const FitResult& r = fit->result();
    const std::string key(model_key(fit->kind()));
    comparison.rows.push_back({key, static_cast<std::int64_t>(r.n_params), r.loglik, r.aic, r.bic});
    rows.push_back({{"model", key}, {"n_params", r.n_params}, {"loglik", r.loglik}, {"aic", r.aic}, {"bic", r.bic}});
    fit_nodes.push_back(to_json(*fit));
  }
  report.tables.push_back(std::move(comparison));

  const LikelihoodRatioTest regression_lr = likelihood_ratio_test(fits[0]->result(), fits[1]->result());
  const Dataset response_only = Dataset::intercept_only(data.response());
  const PoissonRegressionFit poisson0 = fit_poisson_glm(response_only);
  const NBRegressionFit nb0 = fit_nb_regression(response_only);
  const LikelihoodRatioTest response_lr = likelihood_ratio_test(poisson0.result(), nb0.result());

  report.json["comparison"] = rows;
  report.json["nb_vs_poisson_lr"] = to_json(regression_lr);
  Json marginal = to_json(response_lr);
  marginal["nb_k"] = nb0.at_boundary() ? Json(nullptr) : Json(nb0.k());
  report.json["response_only_nb_vs_poisson_lr"] = marginal;
  report.json["fits"] = fit_nodes;
  report.tables.push_back(lr_table("NB vs Poisson LR test (regression)", regression_lr));
  report.tables.push_back(lr_table("NB vs Poisson LR test (response only)", response_lr));
  for (const auto& fit : fits) add_fit_tables(*fit, report);
  report.notes.push_back("input: " + options.data.input + " (n = " + std::to_string(data.size()) + ")");
  return report;
}

std::int64_t default_tail_threshold(const Dataset& data) {
  std::int64_t largest = 0;
  for (std::int64_t y : data.response()) largest = std::max(largest, y);
  return std::clamp<std::int64_t>(largest + 1, 1, 20);
}

Report run_diagnose(const Options& options) {
  const Dataset data = load_dataset(options.data);
  const auto fit = fit_model(parse_model_key(options.model), data, options.truncation.policy());
  const RandomStream root(*options.seed);
  RandomStream residual_stream = root.substream(0);
  RandomStream envelope_stream = root.substream(1);

  const ResidualReport residuals = randomized_quantile_residuals(*fit, data, residual_stream);
  const QQEnvelope envelope = qq_envelope(*fit, data, options.envelope_replicates, options.band_level, envelope_stream);
  const DispersionReport dispersion = dispersion_ratio_report(*fit, data, options.groups);
  const std::int64_t threshold = options.tail_threshold > 0 ? options.tail_threshold : default_tail_threshold(data);
  const FrequencyTable frequencies = frequency_table(*fit, data, threshold);

  Report report;
  report.json["command"] = "diagnose";
  report.json["seed"] = *options.seed;
  report.json["data"] = data_summary(options.data, data);
  report.json["fit"] = to_json(*fit);
  report.json["residuals"] = to_json(residuals);
  report.json["qq_envelope"] = to_json(envelope);
  report.json["dispersion"] = to_json(dispersion);
  report.json["frequencies"] = to_json(frequencies);

  report.notes.push_back("model: " + options.model + ", seed: " + std::to_string(*options.seed));
  report.tables.push_back({"residual normality (KS)",
                           {"statistic", "p_value", "zero_width"},
                           {{residuals.ks_statistic, residuals.ks_p_value,
                             static_cast<std::int64_t>(residuals.zero_width.size())}}});
  Table vr{"dispersion ratios", {"group", "size", "eta_min", "eta_max", "obs_mean", "obs_var", "model_var", "vr"}, {}};
  for (std::size_t g = 0; g < dispersion.groups.size(); ++g) {
    const auto& grp = dispersion.groups[g];
    vr.rows.push_back({static_cast<std::int64_t>(g + 1), static_cast<std::int64_t>(grp.group_size), grp.eta_min,
                       grp.eta_max, grp.observed_mean, grp.observed_variance, grp.mean_theoretical_variance, grp.vr});
  }
  report.tables.push_back(std::move(vr));
  Table freq{"observed vs expected frequencies", {"value", "observed", "expected"}, {}};
  for (const auto& row : frequencies.rows) {
    const std::string label = std::to_string(row.value) + (row.pooled_tail ? "+" : "");
    freq.rows.push_back({label, static_cast<std::int64_t>(row.observed), row.expected});
  }
  report.tables.push_back(std::move(freq));
  Table qq{"q-q envelope", {"theoretical", "residual", "lower", "upper"}, {}};
  for (std::size_t j = 0; j < envelope.theoretical.size(); ++j) {
    qq.rows.push_back({envelope.theoretical[j], envelope.sorted_residuals[j], envelope.lower[j], envelope.upper[j]});
  }
  report.tables.push_back(std::move(qq));
  return report;
}

Report run_simulate(const Options& options) {
  Report report;
  report.json["command"] = "simulate";
  report.json["seed"] = *options.seed;
  if (options.table1) {
    SimulationStudyConfig config;
    config.n_obs = options.n_obs;
    config.replicate_count = options.replicates;
    config.master_seed = *options.seed;
    const StudyResult study = run_simulation_study(config, options.threads);
    report.json["study"] = {{"n_obs", config.n_obs}, {"true_beta", config.true_beta}};
    report.json["result"] = to_json(study);
    Table table{"simulation study", {"parameter", "truth", "mean_estimate", "bias", "mse", "mean_ci_length", "coverage"}, {}};
    for (const auto& p : study.parameters) {
      table.rows.push_back({p.name, p.truth, p.mean_estimate, p.bias, p.mse, p.mean_ci_length, p.coverage});
    }
    report.tables.push_back(std::move(table));
    report.notes.push_back("replicates: " + std::to_string(study.replicate_count) +
                           ", failed: " + std::to_string(study.failed_count) + ", seed: " + std::to_string(*options.seed));
  } else {
    RandomStream stream(*options.seed);
    const DispersionMap map = dispersion_map(options.q_grid, options.beta_grid, options.n_per_cell, stream);
    report.json["dispersion_map"] = to_json(map);
    Table table{"dispersion map", {"q", "beta", "mean", "variance", "vr_poisson", "vr_nb", "nb_k", "nb_boundary"}, {}};
    for (const auto& c : map.cells) {
      table.rows.push_back({c.q, c.beta, c.sample_mean, c.sample_variance, c.vr_poisson, c.vr_nb, c.nb_k, c.nb_boundary});
    }
    report.tables.push_back(std::move(table));
    report.notes.push_back("draws per cell: " + std::to_string(map.n_per_cell) + ", seed: " + std::to_string(*options.seed));
  }
  return report;
}

Json read_json_file(const std::string& path) {
  std::ifstream input(path);
  if (!input) throw DataError("cannot open model file '" + path + "'");
  try {
    return Json::parse(input);
  } catch (const nlohmann::json::parse_error& error) {
    throw DataError("model file '" + path + "' is not valid JSON: " + error.what());
  }
}

Report run_predict(const Options& options) {
  std::optional<ModelKind> selected;
  if (options.predict_model) selected = parse_model_key(*options.predict_model);
  const auto fit = fit_from_json(read_json_file(options.model_file), selected);
  std::vector<std::string> covariates = options.data.covariates;
  if (covariates.empty()) {
    for (const auto& name : fit->design_names()) {
      if (!(fit->has_intercept() && name == kInterceptName)) covariates.push_back(name);
    }
  }
  for (double tau : options.quantiles) {
    if (!(tau > 0.0 && tau < 1.0)) throw UsageError("quantile levels must lie in (0, 1)");
  }
  const Eigen::MatrixXd rows = read_covariate_rows(options.data.input, covariates);

  Table table{"predictions", {"row", "eta", "median", "mean"}, {}};
  for (double tau : options.quantiles) table.columns.push_back("q" + shortest(tau));
  Json predictions = Json::array();
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const Eigen::VectorXd x = rows.row(i).transpose();
    const double eta = fit->linear_predictor(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
    const std::int64_t median = fit->quantile(0.5, eta);
    const double mean = fit->mean(eta);
    std::vector<Cell> row{static_cast<std::int64_t>(i + 1), eta, median, mean};
    Json quantiles = Json::array();
    for (double tau : options.quantiles) {
      const std::int64_t value = fit->quantile(tau, eta);
      row.emplace_back(value);
      quantiles.push_back({{"tau", tau}, {"value", value}});
    }
    table.rows.push_back(std::move(row));
    predictions.push_back({{"row", i + 1},
                           {"eta", eta},
                           {"median", median},
                           {"mean", std::isfinite(mean) ? Json(mean) : Json(nullptr)},
                           {"quantiles", quantiles}});
  }
  Report report;
  report.json["command"] = "predict";
  report.json["model"] = std::string(model_key(fit->kind()));
  report.json["covariates"] = covariates;
  report.json["predictions"] = predictions;
  report.tables.push_back(std::move(table));
  return report;
}

void add_format_options(CLI::App& command, Options& options) {
  command.add_option("--format", options.format, "Output format")
      ->check(CLI::IsMember({"json", "csv", "text"}))
      ->capture_default_str();
  command.add_option("-o,--output", options.output, "Write output to this file instead of stdout");
}

void add_data_options(CLI::App& command, Options& options) {
  command.add_option("-i,--input", options.data.input, "Input CSV file")->required();
  command.add_option("-r,--response", options.data.response, "Response column (nonnegative integer counts)")
      ->required();
  command.add_option("-x,--covariates", options.data.covariates, "Covariate columns, comma separated")
      ->delimiter(',');
  command.add_flag("--no-intercept", options.data.no_intercept, "Fit without an intercept");
  command.add_option("--term-tolerance", options.truncation.term_tolerance,
                     "Stop DW moment series when terms fall below this")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  command.add_option("--max-terms", options.truncation.max_terms, "Cap on DW moment series terms")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_format_options(command, options);
}

const CLI::Validator kModelKey = CLI::IsMember({"dw", "poisson", "nb"});

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options options;
  CLI::App app{"Discrete Weibull regression for count data", "dwreg"};
  app.require_subcommand(1);

  auto* fit = app.add_subcommand("fit", "Fit one or more count regression models");
  add_data_options(*fit, options);
  fit->add_option("-m,--model", options.models, "Models to fit: dw, poisson, nb")
      ->delimiter(',')
      ->check(kModelKey)
      ->capture_default_str();

  auto* compare = app.add_subcommand("compare", "Fit dw, poisson and nb; AIC/BIC table and NB-vs-Poisson LR tests");
  add_data_options(*compare, options);

  auto* diagnose = app.add_subcommand("diagnose", "Residuals, Q-Q envelope, dispersion ratios, frequencies");
  add_data_options(*diagnose, options);
  diagnose->add_option("-m,--model", options.model, "Model to diagnose")->check(kModelKey)->capture_default_str();
  diagnose->add_option("--seed", options.seed, "Random seed (required)")->required();
  diagnose->add_option("--groups", options.groups, "Number of dispersion-ratio groups")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  diagnose->add_option("--envelope-replicates", options.envelope_replicates, "Simulated replicates for the envelope")
      ->check(CLI::Range(19, 100000))
      ->capture_default_str();
  diagnose->add_option("--band-level", options.band_level, "Envelope band level")
      ->check(CLI::Range(0.5, 0.999))
      ->capture_default_str();
  diagnose->add_option("--tail-threshold", options.tail_threshold,
                       "Pool observed/expected frequencies at and above this value (default: max(y)+1, at most 20)")
      ->check(CLI::PositiveNumber);

  auto* simulate = app.add_subcommand("simulate", "Run the parameter-recovery study or the dispersion map");
  auto* table1 = simulate->add_flag("--table1", options.table1, "Parameter-recovery study for DW regression");
  auto* map = simulate->add_flag("--dispersion-map", options.map, "Variance ratios over a (q, beta) grid");
  table1->excludes(map);
  simulate->add_option("--seed", options.seed, "Master seed (required)")->required();
  simulate->add_option("--replicates", options.replicates, "Study replicates")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--n-obs", options.n_obs, "Observations per replicate")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--threads", options.threads, "Worker threads (results do not depend on this)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--q-grid", options.q_grid, "q values for the dispersion map")
      ->delimiter(',')
      ->check(CLI::Range(1e-12, 1.0 - 1e-12));
  simulate->add_option("--beta-grid", options.beta_grid, "beta values for the dispersion map")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  simulate->add_option("--n-per-cell", options.n_per_cell, "Draws per dispersion-map cell")
      ->check(CLI::Range(2, 100000000))
      ->capture_default_str();
  add_format_options(*simulate, options);

  auto* predict = app.add_subcommand("predict", "Fitted median, quantiles and mean for covariate rows");
  predict->add_option("--model-file", options.model_file, "JSON written by `fit`, `compare` or `diagnose`")
      ->required();
  predict->add_option("-m,--model", options.predict_model, "Which fit to use when the model file holds several")
      ->check(kModelKey);
  predict->add_option("-i,--input", options.data.input, "CSV with covariate columns")->required();
  predict->add_option("-x,--covariates", options.data.covariates, "Covariate columns (default: the model's)")
      ->delimiter(',');
  predict->add_option("--quantiles", options.quantiles, "Quantile levels to report")
      ->delimiter(',')
      ->capture_default_str();
  add_format_options(*predict, options);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& error) {
    if (error.get_exit_code() == 0) {
      app.exit(error, out, err);
      return kExitSuccess;
    }
    err << "error: " << error.what() << "\n";
    err << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    Report report;
    if (fit->parsed()) {
      report = run_fit(options);
    } else if (compare->parsed()) {
      report = run_compare(options);
    } else if (diagnose->parsed()) {
      report = run_diagnose(options);
    } else if (simulate->parsed()) {
      if (!options.table1 && !options.map) throw UsageError("simulate needs --table1 or --dispersion-map");
      report = run_simulate(options);
    } else {
      report = run_predict(options);
    }
    const Format format = parse_format(options.format);
    if (options.output.empty()) {
      write_report(report, format, out);
    } else {
      std::ofstream file(options.output, std::ios::binary);
      if (!file) throw DataError("cannot write output file '" + options.output + "'");
      write_report(report, format, file);
    }
    return kExitSuccess;
  } catch (const UsageError& error) {
    err << "usage error: " << error.what() << "\n";
    return kExitUsage;
  } catch (const DataError& error) {
    err << "data error: " << error.what() << "\n";
    return kExitData;
  } catch (const NumericalError& error) {
    err << "numerical error: " << error.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& error) {
    err << "invalid argument: " << error.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& error) {
    err << "error: " << error.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace dwreg::cli
