#include "dwreg/serialization.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "dwreg/error.hpp"

namespace dwreg {

namespace {

Json number(double value) { return std::isfinite(value) ? Json(value) : Json(nullptr); }

double read_number(const Json& node) {
  if (node.is_null()) return std::numeric_limits<double>::infinity();
  if (!node.is_number()) throw DataError("expected a number in serialized fit, found " + node.dump());
  return node.get<double>();
}

Json numbers(const Eigen::VectorXd& values) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < values.size(); ++i) out.push_back(number(values(i)));
  return out;
}

Json numbers(const std::vector<double>& values) {
  Json out = Json::array();
  for (double v : values) out.push_back(number(v));
  return out;
}

Json matrix(const Eigen::MatrixXd& values) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < values.rows(); ++r) out.push_back(numbers(Eigen::VectorXd(values.row(r).transpose())));
  return out;
}

const Json& member(const Json& node, const char* name) {
  if (!node.is_object() || !node.contains(name)) {
    throw DataError(std::string("serialized fit is missing the '") + name + "' field");
  }
  return node.at(name);
}

Eigen::VectorXd read_vector(const Json& node) {
  if (!node.is_array()) throw DataError("expected an array in serialized fit");
  Eigen::VectorXd out(static_cast<Eigen::Index>(node.size()));
  for (std::size_t i = 0; i < node.size(); ++i) out(static_cast<Eigen::Index>(i)) = read_number(node[i]);
  return out;
}

Eigen::MatrixXd read_matrix(const Json& node, Eigen::Index size) {
  if (!node.is_array() || static_cast<Eigen::Index>(node.size()) != size) {
    throw DataError("serialized covariance has the wrong shape");
  }
  Eigen::MatrixXd out(size, size);
  for (Eigen::Index r = 0; r < size; ++r) {
    const Eigen::VectorXd row = read_vector(node[static_cast<std::size_t>(r)]);
    if (row.size() != size) throw DataError("serialized covariance has the wrong shape");
    out.row(r) = row.transpose();
  }
  return out;
}

Json coefficient_table(const FitResult& result) {
  Json rows = Json::array();
  for (std::size_t j = 0; j < result.n_params; ++j) {
    const double se = result.standard_error(j);
    Json row;
    row["name"] = result.parameter_names[j];
    row["estimate"] = number(result.estimates(static_cast<Eigen::Index>(j)));
    row["std_error"] = number(se);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

Json to_json(const FitResult& result) {
  Json node;
  node["parameter_names"] = result.parameter_names;
  node["estimates"] = numbers(result.estimates);
  node["vcov"] = matrix(result.vcov);
  node["loglik"] = number(result.loglik);
  node["aic"] = number(result.aic);
  node["bic"] = number(result.bic);
  node["converged"] = result.converged;
  node["n_obs"] = result.n_obs;
  node["n_params"] = result.n_params;
  node["iterations"] = result.iterations;
  node["coefficients"] = coefficient_table(result);
  return node;
}

FitResult fit_result_from_json(const Json& node) {
  FitResult result;
  try {
    result.parameter_names = member(node, "parameter_names").get<std::vector<std::string>>();
    result.estimates = read_vector(member(node, "estimates"));
    result.vcov = read_matrix(member(node, "vcov"), result.estimates.size());
    result.loglik = read_number(member(node, "loglik"));
    result.aic = read_number(member(node, "aic"));
    result.bic = read_number(member(node, "bic"));
    result.converged = member(node, "converged").get<bool>();
    result.n_obs = member(node, "n_obs").get<std::size_t>();
    result.n_params = member(node, "n_params").get<std::size_t>();
    result.iterations = member(node, "iterations").get<std::size_t>();
  } catch (const nlohmann::json::exception& error) {
    throw DataError(std::string("malformed serialized fit: ") + error.what());
  }
  if (result.parameter_names.size() != static_cast<std::size_t>(result.estimates.size()) ||
      result.n_params != result.parameter_names.size()) {
    throw DataError("serialized fit has inconsistent parameter counts");
  }
  return result;
}

Json to_json(const CountRegressionFit& fit) {
  Json node;
  node["model"] = std::string(model_key(fit.kind()));
  node["design_names"] = fit.design_names();
  node["has_intercept"] = fit.has_intercept();
  node["result"] = to_json(fit.result());
  if (const auto* dw = dynamic_cast<const DWRegressionFit*>(&fit)) {
    node["beta"] = number(dw->beta());
    node["truncation"] = {{"term_tolerance", dw->truncation().term_tolerance},
                          {"max_terms", dw->truncation().max_terms}};
    const MedianInterpretation view = interpret_coefficients(*dw);
    Json effects = Json::array();
    for (const auto& effect : view.effects) effects.push_back({{"name", effect.name}, {"effect", number(effect.effect)}});
    node["median_scale"] = {{"intercept_term", number(view.intercept_term)}, {"effects", effects}};
  } else if (const auto* nb = dynamic_cast<const NBRegressionFit*>(&fit)) {
    node["k"] = number(nb->k());
    node["at_boundary"] = nb->at_boundary();
    if (nb->poisson_reference()) node["poisson_reference"] = to_json(*nb->poisson_reference());
  }
  return node;
}

namespace {

const Json& select_fit(const Json& document, std::optional<ModelKind> model) {
  if (!document.is_object()) throw DataError("serialized fit: expected a JSON object");
  if (document.contains("fit")) return document.at("fit");
  if (!document.contains("fits")) return document;
  const Json& fits = document.at("fits");
  if (!fits.is_array() || fits.empty()) throw DataError("serialized fit: \"fits\" holds no models");
  if (!model) {
    if (fits.size() == 1) return fits.front();
    throw DataError("document holds " + std::to_string(fits.size()) + " fits; choose one with --model");
  }
  for (const Json& candidate : fits) {
    if (candidate.is_object() && candidate.value("model", "") == model_key(*model)) return candidate;
  }
  throw DataError("document holds no '" + std::string(model_key(*model)) + "' fit");
}

}  // namespace

std::unique_ptr<CountRegressionFit> fit_from_json(const Json& document, std::optional<ModelKind> model) {
  const Json& node = select_fit(document, model);
  try {
    const ModelKind kind = parse_model_key(member(node, "model").get<std::string>());
    auto names = member(node, "design_names").get<std::vector<std::string>>();
    const bool intercept = member(node, "has_intercept").get<bool>();
    FitResult result = fit_result_from_json(member(node, "result"));
    const std::size_t shape = kind == ModelKind::Poisson ? 0 : 1;
    if (names.size() + shape != result.n_params) throw DataError("serialized fit: design names do not match estimates");
    switch (kind) {
      case ModelKind::DiscreteWeibull: {
        TruncationPolicy policy;
        if (node.contains("truncation")) {
          policy.term_tolerance = node["truncation"].at("term_tolerance").get<double>();
          policy.max_terms = node["truncation"].at("max_terms").get<std::size_t>();
        }
        return std::make_unique<DWRegressionFit>(std::move(result), std::move(names), intercept, policy);
      }
      case ModelKind::Poisson:
        return std::make_unique<PoissonRegressionFit>(std::move(result), std::move(names), intercept);
      case ModelKind::NegativeBinomial: {
        std::optional<FitResult> reference;
        if (node.contains("poisson_reference")) reference = fit_result_from_json(node["poisson_reference"]);
        return std::make_unique<NBRegressionFit>(std::move(result), std::move(names), intercept, std::move(reference));
      }
    }
  } catch (const nlohmann::json::exception& error) {
    throw DataError(std::string("malformed serialized fit: ") + error.what());
  } catch (const std::invalid_argument& error) {
    throw DataError(std::string("invalid serialized fit: ") + error.what());
  }
  throw DataError("serialized fit has an unknown model");
}

Json to_json(const ResidualReport& report) {
  Json node;
  node["seed"] = report.seed;
  node["ks_statistic"] = number(report.ks_statistic);
  node["ks_p_value"] = number(report.ks_p_value);
  node["zero_width"] = report.zero_width;
  node["residuals"] = numbers(report.residuals);
  node["uniforms"] = numbers(report.uniforms);
  return node;
}

Json to_json(const QQEnvelope& envelope) {
  Json node;
  node["seed"] = envelope.seed;
  node["replicate_count"] = envelope.replicate_count;
  node["band_level"] = envelope.band_level;
  node["points_outside"] = envelope.points_outside;
  node["theoretical"] = numbers(envelope.theoretical);
  node["sorted_residuals"] = numbers(envelope.sorted_residuals);
  node["lower"] = numbers(envelope.lower);
  node["upper"] = numbers(envelope.upper);
  return node;
}

Json to_json(const DispersionReport& report) {
  Json groups = Json::array();
  for (const auto& g : report.groups) {
    groups.push_back({{"group_size", g.group_size},
                      {"eta_min", number(g.eta_min)},
                      {"eta_max", number(g.eta_max)},
                      {"observed_mean", number(g.observed_mean)},
                      {"observed_variance", number(g.observed_variance)},
                      {"mean_theoretical_variance", number(g.mean_theoretical_variance)},
                      {"vr", number(g.vr)}});
  }
  return {{"group_count", report.group_count}, {"groups", groups}};
}

Json to_json(const FrequencyTable& table) {
  Json rows = Json::array();
  for (const auto& row : table.rows) {
    rows.push_back({{"value", row.value},
                    {"pooled_tail", row.pooled_tail},
                    {"observed", row.observed},
                    {"expected", number(row.expected)}});
  }
  return {{"tail_threshold", table.tail_threshold}, {"rows", rows}};
}

Json to_json(const LikelihoodRatioTest& test) {
  return {{"statistic", number(test.statistic)}, {"df", test.df}, {"p_value", number(test.p_value)}};
}

Json to_json(const StudyResult& study) {
  Json parameters = Json::array();
  for (const auto& p : study.parameters) {
    parameters.push_back({{"name", p.name},
                          {"truth", number(p.truth)},
                          {"mean_estimate", number(p.mean_estimate)},
                          {"bias", number(p.bias)},
                          {"mse", number(p.mse)},
                          {"mean_ci_length", number(p.mean_ci_length)},
                          {"coverage", number(p.coverage)}});
  }
  Json failures = Json::array();
  for (const auto& r : study.replicates) {
    if (!r.success) failures.push_back({{"replicate", r.index}, {"reason", r.failure}});
  }
  Json node;
  node["seed"] = study.master_seed;
  node["replicate_count"] = study.replicate_count;
  node["failed_count"] = study.failed_count;
  node["parameters"] = parameters;
  node["failures"] = failures;
  return node;
}

Json to_json(const DispersionMap& map) {
  Json cells = Json::array();
  for (const auto& c : map.cells) {
    cells.push_back({{"q", c.q},
                     {"beta", c.beta},
                     {"sample_mean", number(c.sample_mean)},
                     {"sample_variance", number(c.sample_variance)},
                     {"vr_poisson", number(c.vr_poisson)},
                     {"vr_nb", number(c.vr_nb)},
                     {"nb_k", number(c.nb_k)},
                     {"nb_boundary", c.nb_boundary}});
  }
  Json node;
  node["seed"] = map.seed;
  node["n_per_cell"] = map.n_per_cell;
  node["q_grid"] = numbers(map.q_grid);
  node["beta_grid"] = numbers(map.beta_grid);
  node["cells"] = cells;
  return node;
}

std::string dump_document(Json body) {
  Json document;
  document["schema_version"] = kSchemaVersion;
  for (auto& [key, value] : body.items()) document[key] = std::move(value);
  return document.dump(2) + "\n";
}

}  // namespace dwreg
