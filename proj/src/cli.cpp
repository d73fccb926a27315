#include "blockstrat/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "blockstrat/contexts.hpp"
#include "blockstrat/eval.hpp"
#include "blockstrat/ingest.hpp"
#include "blockstrat/io.hpp"
#include "blockstrat/mmsbm.hpp"
#include "blockstrat/network.hpp"
#include "blockstrat/sbm.hpp"
#include "blockstrat/strategy.hpp"
#include "blockstrat/synth.hpp"

namespace blockstrat {

namespace {

namespace fs = std::filesystem;

// Flags shared by the subcommands; unused ones keep their defaults.
struct RunConfig {
  std::string input;
  std::string schema;
  std::string schema_file;
  std::string model = "mmsbm";
  std::string model_file;
  std::string spec_file;
  std::string market_file;
  int K = 4;
  int L = 8;
  std::string k_range = "1:10";
  std::string l_range = "1:10";
  int folds = 5;
  std::uint64_t seed = 0;
  int restarts = 10;
  int max_iterations = 1000;
  double tolerance = 1e-8;
  double tie_tolerance = kDefaultTieTolerance;
  double entropy_low = 0.35;
  double entropy_medium = 0.7;
  std::string out;
  std::string format = "json";
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<int> parse_range(const std::string& text) {
  std::vector<int> values;
  auto colon = text.find(':');
  try {
    if (colon != std::string::npos) {
      const int lo = std::stoi(text.substr(0, colon));
      const int hi = std::stoi(text.substr(colon + 1));
      for (int v = lo; v <= hi; ++v) values.push_back(v);
    } else {
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) values.push_back(std::stoi(item));
    }
  } catch (const std::exception&) {
    throw UsageError("bad range '" + text + "' (use lo:hi or a,b,c)");
  }
  if (values.empty()) throw UsageError("empty range '" + text + "'");
  for (int v : values) {
    if (v < 1) throw UsageError("range values must be >= 1");
  }
  return values;
}

FitConfig fit_config(const RunConfig& rc) {
  FitConfig c;
  c.max_iterations = rc.max_iterations;
  c.rel_tolerance = rc.tolerance;
  c.restarts = rc.restarts;
  c.seed = rc.seed;
  c.validate();
  return c;
}

AnnealConfig anneal_config(const RunConfig& rc) {
  AnnealConfig c;
  c.seed = rc.seed;
  return c;
}

ModelSpec model_spec(const RunConfig& rc) {
  if (rc.model == "naive") return NaiveModel{};
  if (rc.model == "sbm") return SbmModel{rc.K, rc.L, anneal_config(rc)};
  if (rc.model == "mmsbm") return MmsbmModel{rc.K, rc.L, fit_config(rc)};
  throw UsageError("unknown model '" + rc.model + "' (naive, sbm, mmsbm)");
}

ContextSchema single_schema(const RunConfig& rc) {
  if (!rc.schema.empty()) return ContextSchema::from_tags(rc.schema);
  if (!rc.schema_file.empty()) {
    auto spec = read_schema_file(rc.schema_file);
    if (spec.size() != 1) throw UsageError("--schema-file must hold exactly one schema here");
    return ContextSchema::from_tags(spec.front());
  }
  throw UsageError("one of --schema or --schema-file is required");
}

Json run_config_json(const std::string& command, const RunConfig& rc) {
  Json j = {{"command", command}, {"input", rc.input}, {"seed", rc.seed}, {"out", rc.out}};
  auto put_model = [&] {
    j["model"] = rc.model;
    j["K"] = rc.K;
    j["L"] = rc.L;
    j["restarts"] = rc.restarts;
    j["max_iterations"] = rc.max_iterations;
    j["rel_tolerance"] = number(rc.tolerance);
  };
  if (command == "fit" || command == "cv" || command == "compare-reps") put_model();
  if (command == "cv" || command == "compare-reps" || command == "grid") j["folds"] = rc.folds;
  if (command == "grid") {
    j["K_range"] = rc.k_range;
    j["L_range"] = rc.l_range;
    j["tie_tolerance"] = number(rc.tie_tolerance);
    j["restarts"] = rc.restarts;
    j["max_iterations"] = rc.max_iterations;
    j["rel_tolerance"] = number(rc.tolerance);
  }
  if (!rc.schema.empty()) j["schema"] = rc.schema;
  if (!rc.schema_file.empty()) j["schema_file"] = rc.schema_file;
  if (!rc.model_file.empty()) j["model_file"] = rc.model_file;
  if (!rc.spec_file.empty()) j["spec"] = rc.spec_file;
  if (command == "analyze") {
    j["entropy_low"] = number(rc.entropy_low);
    j["entropy_medium"] = number(rc.entropy_medium);
  }
  return j;
}

std::vector<PlayerHistory> load_input(const RunConfig& rc) {
  if (rc.input.empty()) throw UsageError("--input is required");
  return read_log_file(rc.input);
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory " + dir + ": " + ec.message());
}

std::vector<std::string> fold_labels(int folds) {
  std::vector<std::string> labels;
  for (int f = 0; f < folds; ++f) labels.push_back("fold" + std::to_string(f));
  return labels;
}

int cmd_ingest_check(const RunConfig& rc, std::ostream& out) {
  const auto histories = load_input(rc);
  const SummaryStats s = dataset_summary(histories);
  Json j = {{"players", s.players},
            {"sessions", s.sessions},
            {"records", s.records},
            {"min_rounds", s.min_rounds},
            {"max_rounds", s.max_rounds},
            {"up_fraction", number(s.up_fraction)},
            {"market_up_fraction", number(s.market_up_fraction)},
            {"consulted_fraction", number(s.consulted_fraction)},
            {"expert_accuracy", s.expert_accuracy ? number(*s.expert_accuracy) : Json(nullptr)},
            {"run_config", run_config_json("ingest-check", rc)}};
  if (!rc.out.empty()) write_json_file(rc.out, j);
  out << "ingest-check: " << s.players << " players, " << s.records << " records, rounds "
      << s.min_rounds << ".." << s.max_rounds << ", up " << format_number(s.up_fraction)
      << ", expert accuracy "
      << (s.expert_accuracy ? format_number(*s.expert_accuracy) : std::string("n/a")) << '\n';
  return kExitOk;
}

int cmd_synth(const RunConfig& rc, std::ostream& out) {
  if (rc.out.empty()) throw UsageError("--out is required");
  PlantedSpec spec = planted_spec_from_json(read_json_file(rc.spec_file));
  spec.seed = rc.seed;
  if (!rc.market_file.empty()) {
    std::ifstream in(rc.market_file);
    if (!in) throw DataError("cannot open " + rc.market_file);
    spec.market_replay.clear();
    std::string token;
    while (in >> token) {
      for (auto& ch : token) {
        if (ch == ',') ch = ' ';
      }
      std::stringstream ss(token);
      std::string t;
      while (ss >> t) {
        auto d = parse_direction(t);
        if (!d) throw DataError("market file entries must be UP or DOWN, got '" + t + "'");
        spec.market_replay.push_back(*d);
      }
    }
    try {
      spec.validate();
    } catch (const std::invalid_argument& e) {
      throw DataError(e.what());
    }
  }
  const auto histories = generate(spec);
  write_log_file(rc.out, histories);
  out << "synth: " << histories.size() << " players x " << spec.rounds << " rounds -> " << rc.out
      << '\n';
  return kExitOk;
}

int cmd_fit(const RunConfig& rc, std::ostream& out) {
  if (rc.out.empty()) throw UsageError("--out is required");
  const ContextSchema schema = single_schema(rc);
  const auto histories = load_input(rc);
  const DecisionNetwork net = build_network(histories, schema);
  if (net.empty()) throw DataError("no usable rounds under schema " + schema.tags());

  if (rc.model == "mmsbm") {
    const FitConfig config = fit_config(rc);
    const FitResult result = fit(net, rc.K, rc.L, config);
    Json j = to_json(make_saved_model(net, result, config));
    j["run_config"] = run_config_json("fit", rc);
    Json warnings = result.diagnostics.warnings;
    j["warnings"] = warnings;
    write_json_file(rc.out, j);
    out << "fit: mmsbm K=" << result.params.K << " L=" << result.params.L << " players="
        << net.players() << " contexts=" << net.contexts()
        << " log_posterior=" << format_number(result.log_posterior) << " -> " << rc.out << '\n';
  } else if (rc.model == "sbm") {
    const int K = std::min<int>(rc.K, static_cast<int>(net.players()));
    const int L = std::min<int>(rc.L, static_cast<int>(net.contexts()));
    const AnnealResult result = anneal_fit(net, K, L, anneal_config(rc));
    const MmsbmParams params = to_params(result.partition, net);
    SavedPartition saved{schema,
                         result.partition,
                         params.prob,
                         net.player_labels(),
                         net.context_codes(),
                         result.diagnostics.best_objective};
    Json j = to_json(saved);
    j["run_config"] = run_config_json("fit", rc);
    write_json_file(rc.out, j);
    out << "fit: sbm K=" << K << " L=" << L << " log_posterior="
        << format_number(result.diagnostics.best_objective) << " -> " << rc.out << '\n';
  } else {
    throw UsageError("fit supports --model mmsbm or sbm");
  }
  return kExitOk;
}

// Loads either a saved MMSBM or a saved partition as MMSBM parameters.
SavedModel load_any_model(const std::string& path) {
  const Json j = read_json_file(path);
  if (!j.contains("group_of_player")) return saved_model_from_json(j);
  SavedPartition sp = saved_partition_from_json(j);
  const int K = sp.partition.K, L = sp.partition.L;
  if (sp.prob.rows() != static_cast<std::size_t>(K) || sp.prob.cols() != static_cast<std::size_t>(L)) {
    throw DataError("partition file lacks block probabilities");
  }
  SavedModel m;
  m.schema = sp.schema;
  m.player_index = sp.player_index;
  m.context_codes = sp.context_codes;
  m.params = MmsbmParams{K, L, Matrix(sp.player_index.size(), K),
                         Matrix(sp.context_codes.size(), L), sp.prob};
  for (std::size_t p = 0; p < sp.partition.group_of_player.size(); ++p) {
    m.params.theta(p, sp.partition.group_of_player[p]) = 1.0;
  }
  for (std::size_t c = 0; c < sp.partition.group_of_context.size(); ++c) {
    m.params.eta(c, sp.partition.group_of_context[c]) = 1.0;
  }
  m.params.validate();
  m.final_log_posterior = sp.log_posterior;
  return m;
}

int cmd_predict(const RunConfig& rc, std::ostream& out) {
  if (rc.model_file.empty()) throw UsageError("--model-file is required");
  if (rc.out.empty()) throw UsageError("--out is required");
  const SavedModel model = load_any_model(rc.model_file);
  if (!model.schema.structured()) throw DataError("model has no feature schema");
  const auto histories = load_input(rc);
  const ObservationSet data = extract_observations(histories, model.schema);

  std::map<std::string, std::size_t> player_row;
  for (std::size_t p = 0; p < model.player_index.size(); ++p) player_row[model.player_index[p]] = p;
  std::map<int, std::size_t> context_col;
  for (std::size_t c = 0; c < model.context_codes.size(); ++c) context_col[model.context_codes[c]] = c;

  std::ofstream csv(rc.out);
  if (!csv) throw DataError("cannot write " + rc.out);
  csv << "session_id,player_id,round,context,p_up,prediction,fallback,actual\n";
  std::size_t correct = 0, fallbacks = 0;
  for (const Observation& o : data.observations) {
    const PlayerHistory& h = histories[o.player];
    std::optional<std::size_t> p, c;
    if (auto it = player_row.find(h.label()); it != player_row.end()) p = it->second;
    if (auto it = context_col.find(o.context); it != context_col.end()) c = it->second;
    const Prediction pred = predict(model.params, p, c);
    const std::string p_up =
        p && c ? format_number(link_probability(model.params, *p, *c, Direction::Up)) : "";
    csv << h.session_id << ',' << h.player_id << ',' << o.round << ",\""
        << model.schema.context_label(o.context) << "\"," << p_up << ','
        << to_string(pred.direction) << ',' << (pred.fallback ? "true" : "false") << ','
        << to_string(o.guess) << '\n';
    if (pred.direction == o.guess) ++correct;
    if (pred.fallback) ++fallbacks;
  }
  const double accuracy = data.observations.empty()
                              ? 0.0
                              : static_cast<double>(correct) / data.observations.size();
  out << "predict: " << data.observations.size() << " rounds (" << data.skipped
      << " skipped), accuracy " << format_number(accuracy) << ", " << fallbacks
      << " fallback -> " << rc.out << '\n';
  return kExitOk;
}

int cmd_cv(const RunConfig& rc, std::ostream& out) {
  if (rc.out.empty()) throw UsageError("--out is required");
  const ContextSchema schema = single_schema(rc);
  const ModelSpec model = model_spec(rc);
  const auto histories = load_input(rc);
  const FoldSplit split = kfold_split(histories, rc.folds, rc.seed);
  const std::vector<double> acc = cv_accuracy(histories, schema, model, split);

  if (rc.format == "csv") {
    std::ofstream csv(rc.out);
    if (!csv) throw DataError("cannot write " + rc.out);
    csv << "schema,model,fold,accuracy\n";
    for (std::size_t f = 0; f < acc.size(); ++f) {
      csv << schema.tags() << ',' << describe(model) << ',' << f << ',' << format_number(acc[f])
          << '\n';
    }
  } else {
    Json accuracies = Json::array();
    for (double a : acc) accuracies.push_back(number(a));
    Json j = {{"schemas", {schema.tags()}},
              {"folds", rc.folds},
              {"models", {describe(model)}},
              {"accuracies", {{describe(model), {{schema.tags(), accuracies}}}}},
              {"mean_accuracy", number(mean(acc))},
              {"run_config", run_config_json("cv", rc)}};
    write_json_file(rc.out, j);
  }
  out << "cv: " << describe(model) << " schema " << schema.tags() << " mean accuracy "
      << format_number(mean(acc)) << " over " << rc.folds << " folds -> " << rc.out << '\n';
  return kExitOk;
}

int cmd_compare_reps(const RunConfig& rc, std::ostream& out) {
  if (rc.out.empty()) throw UsageError("--out is required");
  std::vector<std::string> spec;
  if (!rc.schema.empty()) {
    spec.push_back(rc.schema);
  } else if (!rc.schema_file.empty()) {
    spec = read_schema_file(rc.schema_file);
  } else {
    spec = default_schema_spec();
  }
  const auto schemas = enumerate_schemas(spec);
  if (schemas.empty()) throw UsageError("no schemas to compare");
  const ModelSpec model = model_spec(rc);
  const auto histories = load_input(rc);
  const FoldSplit split = kfold_split(histories, rc.folds, rc.seed);
  const RepresentationReport report = compare_representations(histories, schemas, model, split);

  ensure_directory(rc.out);
  Json j = to_json(report);
  j["folds"] = rc.folds;
  j["models"] = {describe(model)};
  j["run_config"] = run_config_json("compare-reps", rc);
  write_json_file((fs::path(rc.out) / "report.json").string(), j);
  write_matrix_csv_file((fs::path(rc.out) / "q_matrix.csv").string(), "schema", report.schemas,
                        report.schemas, report.q);
  Matrix acc(report.schemas.size(), rc.folds);
  for (std::size_t s = 0; s < report.schemas.size(); ++s) {
    for (int f = 0; f < rc.folds; ++f) acc(s, f) = report.accuracies[s][f];
  }
  write_matrix_csv_file((fs::path(rc.out) / "accuracies.csv").string(), "schema", report.schemas,
                        fold_labels(rc.folds), acc);

  std::size_t best = 0;
  for (std::size_t s = 1; s < report.means.size(); ++s) {
    if (report.means[s] > report.means[best]) best = s;
  }
  out << "compare-reps: " << report.schemas.size() << " schemas, best " << report.schemas[best]
      << " mean accuracy " << format_number(report.means[best]) << " -> " << rc.out << '\n';
  return kExitOk;
}

int cmd_grid(const RunConfig& rc, std::ostream& out) {
  if (rc.out.empty()) throw UsageError("--out is required");
  const ContextSchema schema = single_schema(rc);
  const auto Ks = parse_range(rc.k_range);
  const auto Ls = parse_range(rc.l_range);
  const auto histories = load_input(rc);
  const FoldSplit split = kfold_split(histories, rc.folds, rc.seed);
  const GridResult grid = grid_select(histories, schema, Ks, Ls, split, fit_config(rc),
                                      rc.tie_tolerance);
  if (rc.format == "csv") {
    std::ofstream csv(rc.out);
    if (!csv) throw DataError("cannot write " + rc.out);
    csv << "K,L,mean_accuracy\n";
    for (const auto& cell : grid.cells) {
      csv << cell.K << ',' << cell.L << ',' << format_number(cell.mean) << '\n';
    }
  } else {
    Json j = to_json(grid);
    j["schemas"] = {schema.tags()};
    j["folds"] = rc.folds;
    j["run_config"] = run_config_json("grid", rc);
    write_json_file(rc.out, {{"grid", j}, {"run_config", run_config_json("grid", rc)}});
  }
  out << "grid: best K=" << grid.best_K << " L=" << grid.best_L << " over " << grid.cells.size()
      << " cells -> " << rc.out << '\n';
  return kExitOk;
}

int cmd_analyze(const RunConfig& rc, std::ostream& out) {
  if (rc.model_file.empty()) throw UsageError("--model-file is required");
  if (rc.out.empty()) throw UsageError("--out is required");
  const SavedModel model = saved_model_from_json(read_json_file(rc.model_file));
  if (model.schema.tags() != "BCE") throw DataError("analyze needs a model fitted with schema BCE");
  const auto histories = load_input(rc);
  const DecisionNetwork net = build_network(histories, model.schema);
  if (net.player_labels() != model.player_index || net.context_codes() != model.context_codes) {
    throw DataError("--input does not match the nodes the model was fitted on");
  }
  const StrategyReport report =
      analyze(model.params, net, EntropyBoundaries{rc.entropy_low, rc.entropy_medium});

  ensure_directory(rc.out);
  Json j = to_json(report, net);
  j["run_config"] = run_config_json("analyze", rc);
  write_json_file((fs::path(rc.out) / "strategy.json").string(), j);

  std::vector<std::string> groups, contexts, patterns;
  for (int k = 0; k < model.params.K; ++k) {
    groups.push_back("k" + std::to_string(k + 1) + ":" + to_string(report.labels[k]));
  }
  for (std::size_t c = 0; c < net.contexts(); ++c) contexts.push_back(net.context_label(c));
  for (Pattern b : kPatterns) patterns.push_back(to_string(b));
  write_matrix_csv_file((fs::path(rc.out) / "phat.csv").string(), "group", groups, contexts,
                        report.phat);
  write_matrix_csv_file((fs::path(rc.out) / "scores.csv").string(), "group", groups, patterns,
                        report.scores);

  std::ofstream players((fs::path(rc.out) / "players.csv").string());
  if (!players) throw DataError("cannot write players.csv");
  players << "player,entropy,class,D";
  for (const auto& g : groups) players << ",theta_" << g;
  players << '\n';
  for (std::size_t p = 0; p < net.players(); ++p) {
    players << net.player_label(p) << ',' << format_number(report.entropy.entropy[p]) << ','
            << to_string(report.entropy.classes[p]) << ','
            << (report.balance[p] ? format_number(*report.balance[p]) : "");
    for (int k = 0; k < model.params.K; ++k) players << ',' << format_number(model.params.theta(p, k));
    players << '\n';
  }

  out << "analyze: " << model.params.K << " groups [";
  for (std::size_t k = 0; k < report.labels.size(); ++k) {
    out << (k ? " " : "") << to_string(report.labels[k]);
  }
  out << "] -> " << rc.out << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Strategy decomposition of market-guessing logs with bipartite block models",
               "blockstrat"};
  app.require_subcommand(1);
  RunConfig rc;

  auto add_input = [&](CLI::App* c) {
    c->add_option("--input", rc.input, "Decision log CSV")->required();
  };
  auto add_schema = [&](CLI::App* c) {
    auto* s = c->add_option("--schema", rc.schema, "Feature tags, e.g. BCE");
    auto* f = c->add_option("--schema-file", rc.schema_file, "File with one schema per line");
    s->excludes(f);
  };
  auto add_model = [&](CLI::App* c) {
    c->add_option("--K", rc.K, "Player groups")->check(CLI::PositiveNumber);
    c->add_option("--L", rc.L, "Context groups")->check(CLI::PositiveNumber);
    c->add_option("--restarts", rc.restarts, "EM restarts")->check(CLI::PositiveNumber);
    c->add_option("--max-iter", rc.max_iterations, "EM iteration cap")->check(CLI::PositiveNumber);
    c->add_option("--tol", rc.tolerance, "Relative convergence tolerance");
  };
  auto add_seed = [&](CLI::App* c) {
    c->add_option("--seed", rc.seed, "Random seed (required)")->required();
  };
  auto add_folds = [&](CLI::App* c) {
    c->add_option("--folds", rc.folds, "Cross-validation folds")->check(CLI::Range(2, 1000));
  };
  auto add_format = [&](CLI::App* c) {
    c->add_option("--format", rc.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  };

  auto* ingest = app.add_subcommand("ingest-check", "Validate a decision log and summarize it");
  add_input(ingest);
  ingest->add_option("--out", rc.out, "Write the summary as JSON");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic decision log");
  synth->add_option("--spec", rc.spec_file, "Planted strategy spec (JSON)")->required();
  synth->add_option("--market-file", rc.market_file, "Replay this UP/DOWN market series");
  add_seed(synth);
  synth->add_option("--out", rc.out, "Output CSV")->required();

  auto* fitc = app.add_subcommand("fit", "Fit an MMSBM (or SBM) to one representation");
  add_input(fitc);
  add_schema(fitc);
  add_model(fitc);
  fitc->add_option("--model", rc.model, "mmsbm or sbm")->check(CLI::IsMember({"mmsbm", "sbm"}));
  add_seed(fitc);
  fitc->add_option("--out", rc.out, "Model JSON")->required();

  auto* pred = app.add_subcommand("predict", "Predict guesses with a saved model");
  pred->add_option("--model-file,--model", rc.model_file, "Model or partition JSON")->required();
  add_input(pred);
  pred->add_option("--out", rc.out, "Predictions CSV")->required();

  auto* cv = app.add_subcommand("cv", "Cross-validated accuracy of one model");
  add_input(cv);
  add_schema(cv);
  add_model(cv);
  cv->add_option("--model", rc.model, "naive, sbm or mmsbm")
      ->check(CLI::IsMember({"naive", "sbm", "mmsbm"}));
  add_folds(cv);
  add_seed(cv);
  add_format(cv);
  cv->add_option("--out", rc.out, "Report file")->required();

  auto* compare = app.add_subcommand("compare-reps", "Compare representations (Q matrix)");
  add_input(compare);
  add_schema(compare);
  add_model(compare);
  compare->add_option("--model", rc.model, "naive, sbm or mmsbm")
      ->check(CLI::IsMember({"naive", "sbm", "mmsbm"}));
  add_folds(compare);
  add_seed(compare);
  compare->add_option("--out", rc.out, "Output directory")->required();

  auto* grid = app.add_subcommand("grid", "Select K and L by cross-validation");
  add_input(grid);
  add_schema(grid);
  grid->add_option("--K-range", rc.k_range, "K values, lo:hi or a,b,c");
  grid->add_option("--L-range", rc.l_range, "L values, lo:hi or a,b,c");
  grid->add_option("--restarts", rc.restarts, "EM restarts")->check(CLI::PositiveNumber);
  grid->add_option("--max-iter", rc.max_iterations, "EM iteration cap")->check(CLI::PositiveNumber);
  grid->add_option("--tol", rc.tolerance, "Relative convergence tolerance");
  grid->add_option("--tie-tolerance", rc.tie_tolerance, "Accuracy gap treated as a tie")
      ->check(CLI::NonNegativeNumber);
  add_folds(grid);
  add_seed(grid);
  add_format(grid);
  grid->add_option("--out", rc.out, "Report file")->required();

  auto* an = app.add_subcommand("analyze", "Strategy report for a model fitted on BCE");
  an->add_option("--model-file,--model", rc.model_file, "Model JSON")->required();
  add_input(an);
  an->add_option("--entropy-low", rc.entropy_low, "LOW/MEDIUM boundary as a fraction of log K");
  an->add_option("--entropy-medium", rc.entropy_medium,
                 "MEDIUM/HIGH boundary as a fraction of log K");
  an->add_option("--out", rc.out, "Output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (ingest->parsed()) return cmd_ingest_check(rc, out);
    if (synth->parsed()) return cmd_synth(rc, out);
    if (fitc->parsed()) return cmd_fit(rc, out);
    if (pred->parsed()) return cmd_predict(rc, out);
    if (cv->parsed()) return cmd_cv(rc, out);
    if (compare->parsed()) return cmd_compare_reps(rc, out);
    if (grid->parsed()) return cmd_grid(rc, out);
    if (an->parsed()) return cmd_analyze(rc, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace blockstrat
