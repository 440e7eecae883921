#pragma once

// Object datasets (JSON, histogram CSV) and versioned report documents.

#include "mdepth/deepest.hpp"
#include "mdepth/depths.hpp"
#include "mdepth/inference.hpp"
#include "mdepth/metric_spaces.hpp"
#include "mdepth/simulation.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <string_view>

namespace mdepth {

inline constexpr std::string_view kReportSchema = "mdepth-report/1";

/// One object in the kind-tagged JSON form. Errors mention `index`.
Object object_from_json(const nlohmann::json& j, std::size_t index);
nlohmann::json object_to_json(const Object& obj);

/// JSON array of same-kind objects, each with an optional "label".
Dataset parse_dataset_json(std::string_view text);
Dataset read_dataset_json(std::istream& in);
std::string dataset_to_json(const Dataset& data);

/// One histogram per row: label, then alternating edge and mass columns
/// (e0, m0, e1, m1, ..., e_k). Masses with a positive total are rescaled to 1.
Dataset read_histogram_csv(std::istream& in);

nlohmann::json to_json(const DepthReport& report, bool timing);
nlohmann::json to_json(const InSampleDeepest& result, const Object& object, DepthMethod method);
nlohmann::json to_json(const DeepestResult& result, DepthMethod method, OptimizerKind optimizer);
nlohmann::json to_json(const ExperimentReport& report, bool timing);
nlohmann::json to_json(const PermutationReport& report, bool corrected);
nlohmann::json to_json(const SwapExperimentReport& report);

/// {"schema", "command", "config", "result"}; dumped with shortest
/// round-trip doubles and a trailing newline.
std::string report_document(std::string_view command, const nlohmann::json& config,
                            const nlohmann::json& result);

/// Parses a report document and returns it; throws InvalidArgument when the
/// schema string is missing or not kReportSchema.
nlohmann::json parse_report_document(std::string_view text);

/// Reads the "result" of a depth report document.
DepthReport parse_depth_report(std::string_view text);

/// Tidy exports: one row per value / replicate x column / permutation / repeat x method.
std::string depth_report_csv(const DepthReport& report, bool timing);
std::string experiment_csv(const ExperimentReport& report, bool timing);
std::string permutation_csv(const PermutationReport& report, bool corrected);
std::string swap_csv(const SwapExperimentReport& report);

}  // namespace mdepth
