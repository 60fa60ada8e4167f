#pragma once

#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "dwreg/diagnostics.hpp"
#include "dwreg/estimation.hpp"
#include "dwreg/regression.hpp"
#include "dwreg/simulation.hpp"

namespace dwreg {

inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::ordered_json;

// Non-finite numbers are written as null and read back as +infinity.
Json to_json(const FitResult& result);
Json to_json(const CountRegressionFit& fit);
Json to_json(const ResidualReport& report);
Json to_json(const QQEnvelope& envelope);
Json to_json(const DispersionReport& report);
Json to_json(const FrequencyTable& table);
Json to_json(const LikelihoodRatioTest& test);
Json to_json(const StudyResult& study);
Json to_json(const DispersionMap& map);

FitResult fit_result_from_json(const Json& node);

/// Rebuilds a fit written by to_json(const CountRegressionFit&), either bare,
/// wrapped in a document whose "fit" member holds it, or picked from a "fits"
/// array by model (needed only when the array holds several). Throws
/// DataError on malformed input.
std::unique_ptr<CountRegressionFit> fit_from_json(const Json& node, std::optional<ModelKind> model = std::nullopt);

/// Adds "schema_version" as the first member and serializes with two-space
/// indentation and shortest round-trip number formatting.
std::string dump_document(Json body);

}  // namespace dwreg
