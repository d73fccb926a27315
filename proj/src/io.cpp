#include "blockstrat/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace blockstrat {

namespace {

std::vector<std::string> context_labels(const ContextSchema& schema,
                                        const std::vector<int>& codes) {
  std::vector<std::string> labels;
  for (int code : codes) labels.push_back(schema.context_label(code));
  return labels;
}

ContextSchema schema_from_json(const Json& j) {
  const std::string tags = j.value("schema", std::string());
  return tags.empty() ? ContextSchema{} : ContextSchema::from_tags(tags);
}

std::vector<int> codes_from_json(const ContextSchema& schema, const Json& j) {
  std::vector<int> codes;
  for (const auto& label : j) codes.push_back(schema.parse_context_label(label.get<std::string>()));
  return codes;
}

Json optional_number(const std::optional<double>& x) { return x ? number(*x) : Json(nullptr); }

}  // namespace

double round_significant(double x, int digits) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return std::strtod(buf, nullptr);
}

Json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return round_significant(x);
}

std::string format_number(double x) {
  if (!std::isfinite(x)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", kSignificantDigits, x);
  return buf;
}

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (double v : m.row(r)) row.push_back(number(v));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array()) throw DataError("matrix must be an array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = rows ? j[0].size() : 0;
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw DataError("ragged matrix");
    for (std::size_t c = 0; c < cols; ++c) {
      m(r, c) = j[r][c].is_null() ? std::nan("") : j[r][c].get<double>();
    }
  }
  return m;
}

Json to_json(const FitConfig& config) {
  return {{"max_iterations", config.max_iterations},
          {"rel_tolerance", number(config.rel_tolerance)},
          {"restarts", config.restarts},
          {"seed", config.seed},
          {"epsilon", number(config.epsilon)}};
}

FitConfig fit_config_from_json(const Json& j) {
  FitConfig config;
  config.max_iterations = j.value("max_iterations", config.max_iterations);
  config.rel_tolerance = j.value("rel_tolerance", config.rel_tolerance);
  config.restarts = j.value("restarts", config.restarts);
  config.seed = j.value("seed", config.seed);
  config.epsilon = j.value("epsilon", config.epsilon);
  return config;
}

Json to_json(const AnnealConfig& config) {
  return {{"initial_temperature", number(config.initial_temperature)},
          {"cooling", number(config.cooling)},
          {"moves_per_temperature", config.moves_per_temperature},
          {"stop_temperature", number(config.stop_temperature)},
          {"probe_moves", config.probe_moves},
          {"seed", config.seed}};
}

SavedModel make_saved_model(const DecisionNetwork& network, const FitResult& result,
                            const FitConfig& config) {
  return SavedModel{network.schema(),        result.params, network.player_labels(),
                    network.context_codes(), config,        result.log_posterior};
}

Json to_json(const SavedModel& model) {
  return {{"K", model.params.K},
          {"L", model.params.L},
          {"theta", to_json(model.params.theta)},
          {"eta", to_json(model.params.eta)},
          {"p", to_json(model.params.prob)},
          {"player_index", model.player_index},
          {"context_index", context_labels(model.schema, model.context_codes)},
          {"schema", model.schema.tags()},
          {"config", to_json(model.config)},
          {"final_log_posterior", number(model.final_log_posterior)}};
}

SavedModel saved_model_from_json(const Json& j) {
  try {
    SavedModel model;
    model.schema = schema_from_json(j);
    model.params.K = j.at("K").get<int>();
    model.params.L = j.at("L").get<int>();
    model.params.theta = matrix_from_json(j.at("theta"));
    model.params.eta = matrix_from_json(j.at("eta"));
    model.params.prob = matrix_from_json(j.at("p"));
    model.player_index = j.at("player_index").get<std::vector<std::string>>();
    model.context_codes = codes_from_json(model.schema, j.at("context_index"));
    model.config = fit_config_from_json(j.value("config", Json::object()));
    model.final_log_posterior = j.value("final_log_posterior", 0.0);
    if (model.params.theta.rows() != model.player_index.size() ||
        model.params.eta.rows() != model.context_codes.size()) {
      throw DataError("model matrices do not match the node indices");
    }
    // Stored values are rounded to 12 digits, so rows sum to 1 only approximately.
    model.params.validate(1e-9);
    return model;
  } catch (const Json::exception& e) {
    throw DataError(std::string("bad model file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("bad model file: ") + e.what());
  }
}

Json to_json(const SavedPartition& saved) {
  return {{"K", saved.partition.K},
          {"L", saved.partition.L},
          {"group_of_player", saved.partition.group_of_player},
          {"group_of_context", saved.partition.group_of_context},
          {"p", to_json(saved.prob)},
          {"player_index", saved.player_index},
          {"context_index", context_labels(saved.schema, saved.context_codes)},
          {"schema", saved.schema.tags()},
          {"log_posterior", number(saved.log_posterior)}};
}

SavedPartition saved_partition_from_json(const Json& j) {
  try {
    SavedPartition saved;
    saved.schema = schema_from_json(j);
    saved.partition.K = j.at("K").get<int>();
    saved.partition.L = j.at("L").get<int>();
    saved.partition.group_of_player = j.at("group_of_player").get<std::vector<int>>();
    saved.partition.group_of_context = j.at("group_of_context").get<std::vector<int>>();
    if (j.contains("p")) saved.prob = matrix_from_json(j.at("p"));
    saved.player_index = j.value("player_index", std::vector<std::string>{});
    if (j.contains("context_index")) saved.context_codes = codes_from_json(saved.schema, j.at("context_index"));
    saved.log_posterior = j.value("log_posterior", 0.0);
    return saved;
  } catch (const Json::exception& e) {
    throw DataError(std::string("bad partition file: ") + e.what());
  }
}

PlantedSpec planted_spec_from_json(const Json& j) {
  try {
    PlantedSpec spec;
    spec.rounds = j.value("rounds", spec.rounds);
    spec.sessions = j.value("sessions", spec.sessions);
    spec.seed = j.value("seed", spec.seed);
    spec.consult_probability = j.value("consult_probability", spec.consult_probability);
    spec.expert_accuracy = j.value("expert_accuracy", spec.expert_accuracy);
    spec.tremble = j.value("tremble", spec.tremble);
    spec.market_up_probability = j.value("market_up_probability", spec.market_up_probability);
    for (const auto& d : j.value("market_replay", Json::array())) {
      auto dir = parse_direction(d.get<std::string>());
      if (!dir) throw DataError("market_replay entries must be UP or DOWN");
      spec.market_replay.push_back(*dir);
    }
    for (const auto& g : j.at("groups")) {
      MixtureGroup group;
      group.count = g.at("count").get<std::size_t>();
      for (const auto& [name, weight] : g.at("weights").items()) {
        auto s = parse_strategy(name);
        if (!s) throw DataError("unknown strategy '" + name + "'");
        group.weights[static_cast<std::size_t>(*s)] = weight.get<double>();
      }
      spec.groups.push_back(group);
    }
    spec.validate();
    return spec;
  } catch (const Json::exception& e) {
    throw DataError(std::string("bad synth spec: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("bad synth spec: ") + e.what());
  }
}

Json to_json(const PlantedSpec& spec) {
  Json groups = Json::array();
  for (const auto& g : spec.groups) {
    Json weights = Json::object();
    for (std::size_t i = 0; i < kStrategyCount; ++i) {
      if (g.weights[i] > 0.0) weights[to_string(kStrategies[i])] = number(g.weights[i]);
    }
    groups.push_back({{"count", g.count}, {"weights", weights}});
  }
  Json replay = Json::array();
  for (Direction d : spec.market_replay) replay.push_back(to_string(d));
  return {{"rounds", spec.rounds},
          {"sessions", spec.sessions},
          {"seed", spec.seed},
          {"consult_probability", number(spec.consult_probability)},
          {"expert_accuracy", number(spec.expert_accuracy)},
          {"tremble", number(spec.tremble)},
          {"market_up_probability", number(spec.market_up_probability)},
          {"market_replay", replay},
          {"groups", groups}};
}

Json to_json(const RepresentationReport& report) {
  Json accuracies = Json::object();
  Json means = Json::object();
  Json usable = Json::object();
  for (std::size_t s = 0; s < report.schemas.size(); ++s) {
    Json row = Json::array();
    for (double a : report.accuracies[s]) row.push_back(number(a));
    accuracies[report.schemas[s]] = row;
    means[report.schemas[s]] = number(report.means[s]);
    usable[report.schemas[s]] = report.usable_records[s];
  }
  return {{"schemas", report.schemas},
          {"accuracies", accuracies},
          {"mean_accuracy", means},
          {"usable_records", usable},
          {"Q", to_json(report.q)}};
}

Json to_json(const GridResult& grid) {
  Json cells = Json::array();
  for (const auto& cell : grid.cells) {
    Json acc = Json::array();
    for (double a : cell.accuracies) acc.push_back(number(a));
    cells.push_back({{"K", cell.K}, {"L", cell.L}, {"accuracies", acc}, {"mean", number(cell.mean)}});
  }
  return {{"best_K", grid.best_K},
          {"best_L", grid.best_L},
          {"tie_tolerance", number(grid.tie_tolerance)},
          {"cells", cells}};
}

Json to_json(const StrategyReport& report, const DecisionNetwork& network) {
  Json labels = Json::array();
  for (GroupLabel l : report.labels) labels.push_back(to_string(l));
  Json patterns = Json::array();
  for (Pattern b : kPatterns) patterns.push_back(to_string(b));
  Json contexts = Json::array();
  for (std::size_t c = 0; c < network.contexts(); ++c) contexts.push_back(network.context_label(c));
  Json entropy = Json::array(), classes = Json::array(), balance = Json::array();
  for (std::size_t p = 0; p < report.entropy.entropy.size(); ++p) {
    entropy.push_back(number(report.entropy.entropy[p]));
    classes.push_back(to_string(report.entropy.classes[p]));
    balance.push_back(optional_number(report.balance[p]));
  }
  Json mean_membership = Json::array();
  for (double m : report.mean_membership) mean_membership.push_back(number(m));
  return {{"phat", to_json(report.phat)},
          {"M", to_json(report.scores)},
          {"patterns", patterns},
          {"contexts", contexts},
          {"players", network.player_labels()},
          {"labels", labels},
          {"entropy", entropy},
          {"classes", classes},
          {"D", balance},
          {"mean_membership", mean_membership}};
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << j.dump(2) << '\n';
}

void write_matrix_csv(std::ostream& out, const std::string& corner,
                      const std::vector<std::string>& row_labels,
                      const std::vector<std::string>& col_labels, const Matrix& m) {
  auto quoted = [](const std::string& s) {
    return s.find(',') == std::string::npos ? s : "\"" + s + "\"";
  };
  out << corner;
  for (const auto& c : col_labels) out << ',' << quoted(c);
  out << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out << quoted(r < row_labels.size() ? row_labels[r] : std::to_string(r));
    for (double v : m.row(r)) out << ',' << format_number(v);
    out << '\n';
  }
}

void write_matrix_csv_file(const std::string& path, const std::string& corner,
                           const std::vector<std::string>& row_labels,
                           const std::vector<std::string>& col_labels, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  write_matrix_csv(out, corner, row_labels, col_labels, m);
}

}  // namespace blockstrat
