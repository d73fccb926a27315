#pragma once

// JSON and CSV artifacts. Numbers are rounded to 12 significant digits and
// object keys are sorted, so identical runs write identical bytes.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "blockstrat/contexts.hpp"
#include "blockstrat/eval.hpp"
#include "blockstrat/mmsbm.hpp"
#include "blockstrat/sbm.hpp"
#include "blockstrat/strategy.hpp"
#include "blockstrat/synth.hpp"

namespace blockstrat {

using Json = nlohmann::json;

inline constexpr int kSignificantDigits = 12;

double round_significant(double x, int digits = kSignificantDigits);
// Rounded number, or null for NaN / infinity.
Json number(double x);
Json to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

// A fitted MMSBM together with the node indices it was fitted on.
struct SavedModel {
  ContextSchema schema;
  MmsbmParams params;
  std::vector<std::string> player_index;  // player labels ("session/player")
  std::vector<int> context_codes;
  FitConfig config;
  double final_log_posterior = 0.0;
};

SavedModel make_saved_model(const DecisionNetwork& network, const FitResult& result,
                            const FitConfig& config);
Json to_json(const SavedModel& model);
SavedModel saved_model_from_json(const Json& j);

// A fitted hard partition with its profiled block probabilities.
struct SavedPartition {
  ContextSchema schema;
  HardPartition partition;
  Matrix prob;
  std::vector<std::string> player_index;
  std::vector<int> context_codes;
  double log_posterior = 0.0;
};

Json to_json(const SavedPartition& saved);
SavedPartition saved_partition_from_json(const Json& j);

Json to_json(const FitConfig& config);
FitConfig fit_config_from_json(const Json& j);
Json to_json(const AnnealConfig& config);

// {"rounds", "sessions", "seed", "consult_probability", "expert_accuracy",
//  "tremble", "market_up_probability", "market_replay": ["UP", ...],
//  "groups": [{"count": n, "weights": {"WSLS": 0.5, ...}}]}
PlantedSpec planted_spec_from_json(const Json& j);
Json to_json(const PlantedSpec& spec);

Json to_json(const RepresentationReport& report);
Json to_json(const GridResult& grid);
Json to_json(const StrategyReport& report, const DecisionNetwork& network);

Json read_json_file(const std::string& path);
// Pretty-printed with sorted keys and a trailing newline.
void write_json_file(const std::string& path, const Json& j);

// Header row is "<corner>,<col labels...>"; NaN cells are left empty.
void write_matrix_csv(std::ostream& out, const std::string& corner,
                      const std::vector<std::string>& row_labels,
                      const std::vector<std::string>& col_labels, const Matrix& m);
void write_matrix_csv_file(const std::string& path, const std::string& corner,
                           const std::vector<std::string>& row_labels,
                           const std::vector<std::string>& col_labels, const Matrix& m);
std::string format_number(double x);

}  // namespace blockstrat
