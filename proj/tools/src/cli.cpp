#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "cobweb/conv/conv_model.hpp"
#include "cobweb/data/dataset.hpp"
#include "cobweb/error.hpp"
#include "cobweb/eval/harness.hpp"
#include "cobweb/eval/models.hpp"
#include "cobweb/tree_io.hpp"

namespace cobweb::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

constexpr int kReportFormatVersion = 1;
constexpr double kConfidenceLevel = 0.95;

struct RunConfig {
  std::string images = std::string(COBWEB_DEFAULT_DATA_DIR) + "/images-idx3-ubyte.gz";
  std::string labels = std::string(COBWEB_DEFAULT_DATA_DIR) + "/labels-idx1-ubyte.gz";
  std::uint64_t seed = 1;
  std::size_t per_class = 30;
  std::size_t num_runs = 50;
  std::vector<std::string> models{"cobweb3", "convcobweb"};
  double acuity = 1.0;
  std::size_t filter_size = conv::kDefaultFilterSize;
  std::size_t bootstrap_resamples = 10000;
  double lowess_frac = 0.3;
  std::string output_dir = "results";
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  bool quiet = false;
  // Already folded into the other fields by expand_config.
  std::string config_file;
};

void add_run_options(CLI::App& cmd, RunConfig& cfg) {
  cmd.add_option("--config", cfg.config_file, "TOML/INI file of option values (keys as the long flag names); flags override it");
  cmd.add_option("--images", cfg.images, "IDX image file (gzip accepted)")->capture_default_str();
  cmd.add_option("--labels", cfg.labels, "IDX label file (gzip accepted)")->capture_default_str();
  cmd.add_option("--seed", cfg.seed, "Master seed for all randomness")->capture_default_str();
  cmd.add_option("--per-class", cfg.per_class, "Images per digit in each run")->capture_default_str();
  cmd.add_option("--num-runs", cfg.num_runs, "Number of runs")->capture_default_str();
  cmd.add_option("--models", cfg.models, "cobweb3 and/or convcobweb")->capture_default_str();
  cmd.add_option("--acuity", cfg.acuity, "Standard-deviation floor")->capture_default_str();
  cmd.add_option("--filter-size", cfg.filter_size, "Filter width in pixels")->capture_default_str();
  cmd.add_option("--bootstrap-resamples", cfg.bootstrap_resamples, "Bootstrap resamples")
      ->capture_default_str();
  cmd.add_option("--lowess-frac", cfg.lowess_frac, "Lowess window fraction")->capture_default_str();
  cmd.add_option("--workers", cfg.workers, "Worker threads")->capture_default_str();
  cmd.add_flag("--quiet", cfg.quiet, "No progress output");
}

void validate(const RunConfig& cfg) {
  auto positive = [](std::size_t v, const char* name) {
    if (v == 0) throw ConfigError(std::string(name) + " must be positive");
  };
  positive(cfg.per_class, "per-class");
  positive(cfg.num_runs, "num-runs");
  positive(cfg.filter_size, "filter-size");
  positive(cfg.bootstrap_resamples, "bootstrap-resamples");
  positive(cfg.workers, "workers");
  if (!(cfg.acuity > 0.0)) throw ConfigError("acuity must be positive");
  if (!(cfg.lowess_frac > 0.0 && cfg.lowess_frac <= 1.0)) {
    throw ConfigError("lowess-frac must be in (0, 1]");
  }
  if (cfg.models.empty()) throw ConfigError("no models given");
  for (std::size_t i = 0; i < cfg.models.size(); ++i) {
    eval::parse_model_kind(cfg.models[i]);
    if (std::count(cfg.models.begin(), cfg.models.end(), cfg.models[i]) > 1) {
      throw ConfigError("model " + cfg.models[i] + " listed twice");
    }
  }
  for (const auto& path : {cfg.images, cfg.labels}) {
    if (!fs::exists(path)) throw DataError("no such file: " + path);
  }
}

struct Prepared {
  std::shared_ptr<const data::NormalizedDataset> data;
  std::vector<data::Run> runs;
};

Prepared prepare(const RunConfig& cfg) {
  auto raw = std::make_shared<const data::RawDataset>(data::load_raw(cfg.images, cfg.labels));
  Prepared p;
  p.data = std::make_shared<const data::NormalizedDataset>(data::normalize(raw));
  p.runs = data::build_runs(raw->labels, {cfg.seed, cfg.per_class, cfg.num_runs});
  return p;
}

eval::ModelOptions model_options(const RunConfig& cfg) { return {cfg.acuity, cfg.filter_size}; }

Json config_json(const RunConfig& cfg) {
  Json j;
  j["datasetPaths"] = {{"images", cfg.images}, {"labels", cfg.labels}};
  j["seed"] = cfg.seed;
  j["perClass"] = cfg.per_class;
  j["numRuns"] = cfg.num_runs;
  j["models"] = cfg.models;
  j["acuity"] = cfg.acuity;
  j["filterSize"] = cfg.filter_size;
  j["filterTieBreak"] = to_string(TieBreak::kSmallest);
  j["bootstrapResamples"] = cfg.bootstrap_resamples;
  j["confidenceLevel"] = kConfidenceLevel;
  j["lowessFrac"] = cfg.lowess_frac;
  j["lowessIterations"] = 0;
  j["workerCount"] = cfg.workers;
  return j;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path == "-") {
    out << text;
  } else {
    eval::write_file_atomic(path, text);
  }
}

int cmd_eval(const RunConfig& cfg, std::ostream& err) {
  validate(cfg);
  const auto prepared = prepare(cfg);
  const auto& dataset = *prepared.data;

  std::vector<eval::NamedModel> models;
  for (const auto& name : cfg.models) {
    const auto kind = eval::parse_model_kind(name);
    const auto options = model_options(cfg);
    models.push_back({name, [kind, options] { return eval::make_model(kind, options); }});
  }
  eval::CompareOptions options;
  options.seed = cfg.seed;
  options.bootstrap_resamples = cfg.bootstrap_resamples;
  options.level = kConfidenceLevel;
  options.lowess_frac = cfg.lowess_frac;
  options.workers = cfg.workers;
  std::size_t finished = 0;
  const std::size_t total = models.size() * prepared.runs.size();
  if (!cfg.quiet) {
    options.on_run = [&](const eval::RunResult& r) {
      ++finished;
      err << "[" << finished << "/" << total << "] " << r.model << " run "
          << (r.records.empty() ? 0 : r.records.front().run) << ": error "
          << eval::format_number(r.error_rate()) << " in " << eval::format_number(r.seconds)
          << " s\n"
          << std::flush;
    };
  }
  const auto report = eval::compare(models, prepared.runs, [&](std::size_t i) { return dataset.image(i); },
                                    options);

  Json summary;
  summary["format"] = "conv-cobweb-eval-summary";
  summary["formatVersion"] = kReportFormatVersion;
  summary["config"] = config_json(cfg);
  summary["normalization"] = {{"mean", dataset.mean()}, {"std", dataset.std()}};
  summary["datasetSize"] = dataset.size();
  summary["sequenceLength"] = prepared.runs.front().size();
  char fp[17];
  std::snprintf(fp, sizeof fp, "%016llx", static_cast<unsigned long long>(report.runs_fingerprint));
  summary["runsFingerprint"] = fp;
  summary["formatVersions"] = {{"report", kReportFormatVersion},
                               {"tree", kTreeFormatVersion},
                               {"convModel", conv::kModelFormatVersion},
                               {"cobweb3Model", eval::kImageModelFormatVersion}};
  Json results = Json::array();
  for (const auto& row : report.overall) {
    results.push_back({{"model", row.model},
                       {"meanError", row.mean_error},
                       {"ciLow", row.ci.low},
                       {"ciHigh", row.ci.high},
                       {"runs", row.runs}});
  }
  summary["overall"] = results;

  fs::create_directories(cfg.output_dir);
  const fs::path dir(cfg.output_dir);
  // Render everything first so a failure leaves no partial set behind.
  const auto overall = eval::overall_csv(report);
  const auto curve = eval::curve_csv(report);
  const auto timing = eval::timing_csv(report);
  const auto summary_text = summary.dump(2) + "\n";
  eval::write_file_atomic(dir / "overall.csv", overall);
  eval::write_file_atomic(dir / "curve.csv", curve);
  eval::write_file_atomic(dir / "timing.csv", timing);
  eval::write_file_atomic(dir / "summary.json", summary_text);
  if (!cfg.quiet) err << "wrote " << dir.string() << "\n";
  return kOk;
}

int cmd_fit(const RunConfig& cfg, const std::string& model_out, std::ostream& err) {
  validate(cfg);
  if (cfg.models.size() != 1) throw ConfigError("fit needs exactly one model");
  const auto prepared = prepare(cfg);
  auto model = eval::make_model(eval::parse_model_kind(cfg.models.front()), model_options(cfg));
  const auto& run = prepared.runs.front();
  for (std::size_t i = 0; i < run.size(); ++i) {
    model->learn(prepared.data->image(run[i]));
    if (!cfg.quiet && (i + 1) % 50 == 0) err << "fitted " << i + 1 << "/" << run.size() << "\n";
  }
  eval::write_file_atomic(model_out, model->to_json());
  if (!cfg.quiet) err << "wrote " << model_out << "\n";
  return kOk;
}

// A loaded model file of either kind.
struct LoadedModel {
  std::string format;
  std::optional<conv::ConvCobwebModel> conv;
  std::optional<eval::Cobweb3ImageModel> cobweb3;
};

LoadedModel load_model(const std::string& path) {
  const auto text = read_text(path);
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": not JSON: " + e.what());
  }
  LoadedModel m;
  m.format = doc.value("format", "");
  try {
    if (m.format == "conv-cobweb-model") {
      m.conv = conv::ConvCobwebModel::from_json(text);
    } else if (m.format == "cobweb3-image-model") {
      m.cobweb3 = eval::Cobweb3ImageModel::from_json(text);
    } else {
      throw DataError("unknown model format '" + m.format + "'");
    }
  } catch (const Error& e) {
    throw DataError(path + ": " + e.what());
  }
  return m;
}

int cmd_export_dot(const std::string& model_in, const std::string& out_path,
                   const std::string& which, std::ostream& out) {
  const auto m = load_model(model_in);
  std::string dot;
  if (m.conv) {
    dot = which == "filters" ? m.conv->filters_dot() : m.conv->classifier_dot();
  } else {
    if (which == "filters") throw ConfigError("model has no filter hierarchy");
    dot = to_dot(m.cobweb3->tree(), "classifier");
  }
  write_output(out_path, dot, out);
  return kOk;
}

void describe(const std::string& name, const CobwebTree& tree, std::ostream& out) {
  out << name << ": nodes=" << tree.size() << " depth=" << tree.depth()
      << " leaves=" << tree.leaf_count() << " instances=" << tree.node(tree.root()).count << "\n";
}

int cmd_inspect(const std::string& model_in, std::ostream& out) {
  const auto m = load_model(model_in);
  out << "format: " << m.format << "\n";
  if (m.conv) {
    out << "acuity: " << eval::format_number(m.conv->filters().acuity()) << "\n";
    out << "filterSize: " << m.conv->filter_size() << "\n";
    out << "filterTieBreak: " << to_string(m.conv->filters().tie_break()) << "\n";
    describe("filters", m.conv->filters(), out);
    describe("classifier", m.conv->classifier(), out);
  } else {
    out << "acuity: " << eval::format_number(m.cobweb3->tree().acuity()) << "\n";
    describe("classifier", m.cobweb3->tree(), out);
  }
  return kOk;
}

bool on_command_line(const std::vector<std::string>& args, const std::string& name) {
  const std::string flag = "--" + name;
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

// Turns the file named by --config into flags placed straight after the
// subcommand, skipping keys that are also given on the command line.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::optional<std::string> path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (!path || args.empty()) return args;
  if (!fs::exists(*path)) throw DataError("no such config file: " + *path);
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_file(*path);
  } catch (const CLI::Error& e) {
    throw ConfigError(*path + ": " + e.what());
  }
  std::vector<std::string> out{args.front()};
  for (const auto& item : items) {
    if (!item.parents.empty() || item.name == "config" || item.name == "++") continue;
    if (on_command_line(args, item.name)) continue;
    if (item.inputs.size() == 1) {
      out.push_back("--" + item.name + "=" + item.inputs.front());
    } else {
      out.push_back("--" + item.name);
      out.insert(out.end(), item.inputs.begin(), item.inputs.end());
    }
  }
  out.insert(out.end(), args.begin() + 1, args.end());
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Convolutional Cobweb and Cobweb/3 on incremental digit recognition", "convcobweb"};
  app.require_subcommand(1);

  RunConfig eval_cfg;
  auto* eval_cmd = app.add_subcommand("eval", "Run the predict-then-learn comparison");
  add_run_options(*eval_cmd, eval_cfg);
  eval_cmd->add_option("--output-dir", eval_cfg.output_dir, "Directory for the result files")
      ->capture_default_str();

  RunConfig fit_cfg;
  fit_cfg.models = {"convcobweb"};
  std::string model_out;
  auto* fit_cmd = app.add_subcommand("fit", "Train one model on one generated sequence");
  add_run_options(*fit_cmd, fit_cfg);
  fit_cmd->add_option("--out", model_out, "Model JSON to write")->required();

  std::string model_in;
  std::string dot_out = "-";
  std::string which = "classifier";
  auto* dot_cmd = app.add_subcommand("export-dot", "Write a hierarchy as Graphviz DOT");
  dot_cmd->add_option("--model", model_in, "Model JSON")->required();
  dot_cmd->add_option("--out", dot_out, "DOT file, - for standard output")->capture_default_str();
  dot_cmd->add_option("--which", which, "filters or classifier")
      ->check(CLI::IsMember({"filters", "classifier"}))
      ->capture_default_str();

  std::string inspect_in;
  auto* inspect_cmd = app.add_subcommand("inspect", "Summarise a model file");
  inspect_cmd->add_option("--model", inspect_in, "Model JSON")->required();

  std::vector<std::string> expanded;
  try {
    expanded = expand_config(args);
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
  std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (eval_cmd->parsed()) return cmd_eval(eval_cfg, err);
    if (fit_cmd->parsed()) return cmd_fit(fit_cfg, model_out, err);
    if (dot_cmd->parsed()) return cmd_export_dot(model_in, dot_out, which, out);
    return cmd_inspect(inspect_in, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const InvariantError& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const VariantMismatchError& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
}

}  // namespace cobweb::cli
