#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cobweb/data/dataset.hpp"
#include "cobweb/eval/models.hpp"
#include "cobweb/eval/stats.hpp"
#include "cobweb/image.hpp"

namespace cobweb::eval {

struct StepRecord {
  std::size_t run = 0;
  std::size_t step = 0;  // 1-based
  std::optional<std::string> predicted;
  std::string actual;
  bool correct = false;
};

struct RunResult {
  std::string model;
  std::vector<StepRecord> records;
  double seconds = 0.0;
  // Set when the model threw; records then stop at the failing step.
  std::optional<std::string> failure;

  double error_rate() const;
};

// Predict-then-learn over `sequence`: each image is predicted with its
// label withheld, the outcome recorded, and only then learnt with the
// label. A model exception ends the run early; the records gathered so far
// are kept and the message stored in `failure`.
RunResult run_incremental(IncrementalModel& model, std::span<const LabeledImage> sequence,
                          std::size_t run_index = 0, std::string model_name = {});

// Mean of per-run error rates. ConfigError on no runs, DataError when run
// lengths differ.
double overall_error(std::span<const RunResult> runs);

using ImageSource = std::function<LabeledImage(std::size_t index)>;

struct NamedModel {
  std::string name;
  ModelFactory factory;
  // Run list this model is evaluated on; null means the shared list.
  const std::vector<data::Run>* runs = nullptr;
};

struct CompareOptions {
  std::uint64_t seed = 0;
  std::size_t bootstrap_resamples = 10000;
  double level = 0.95;
  double lowess_frac = 0.3;
  std::size_t workers = 1;
  // Called after every finished (model, run) pair; serialised.
  std::function<void(const RunResult&)> on_run;
};

struct OverallRow {
  std::string model;
  double mean_error = 0.0;
  Interval ci;
  std::size_t runs = 0;
  double wall_clock_mean = 0.0;
};

struct CurveRow {
  std::string model;
  std::size_t step = 0;
  double mean_error = 0.0;
  double lowess = 0.0;
  Interval ci;
};

struct ComparisonReport {
  std::vector<OverallRow> overall;
  std::vector<CurveRow> curve;
  // results[m][r]: model m on run r.
  std::vector<std::vector<RunResult>> results;
  std::uint64_t runs_fingerprint = 0;
};

// Runs every model on every run, each pair on a fresh model, spread over
// `workers` threads. Reported numbers do not depend on the worker count or
// scheduling. Bootstrap streams depend only on the seed and the step, so
// models with identical outcomes get identical rows. Throws DataError when
// a model carries its own run list that differs from `runs`, and Error
// naming the model and run when a run failed.
ComparisonReport compare(const std::vector<NamedModel>& models,
                         const std::vector<data::Run>& runs, const ImageSource& images,
                         const CompareOptions& options);

// CSV renderings. overall.csv and curve.csv are deterministic; wall-clock
// figures go to timing.csv only.
std::string overall_csv(const ComparisonReport& report);
std::string curve_csv(const ComparisonReport& report);
std::string timing_csv(const ComparisonReport& report);

// Writes to a temporary sibling and renames it into place, so readers
// never see a partial file. DataError on failure.
void write_file_atomic(const std::filesystem::path& path, std::string_view text);

// Formats a double with enough digits to be stable and readable.
std::string format_number(double value);

}  // namespace cobweb::eval
