#include "cobweb/eval/harness.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "cobweb/data/rng.hpp"
#include "cobweb/error.hpp"

namespace cobweb::eval {

double RunResult::error_rate() const {
  if (records.empty()) return 0.0;
  std::size_t wrong = 0;
  for (const auto& r : records) wrong += !r.correct;
  return static_cast<double>(wrong) / static_cast<double>(records.size());
}

RunResult run_incremental(IncrementalModel& model, std::span<const LabeledImage> sequence,
                          std::size_t run_index, std::string model_name) {
  RunResult out;
  out.model = std::move(model_name);
  out.records.reserve(sequence.size());
  const auto start = std::chrono::steady_clock::now();
  try {
    for (std::size_t i = 0; i < sequence.size(); ++i) {
      const LabeledImage& image = sequence[i];
      if (!image.label) throw DataError("image " + std::to_string(i + 1) + " has no label");
      LabeledImage query = image;
      query.label.reset();
      StepRecord rec;
      rec.run = run_index;
      rec.step = i + 1;
      rec.predicted = model.predict(query);
      rec.actual = *image.label;
      rec.correct = rec.predicted == rec.actual;
      out.records.push_back(std::move(rec));
      model.learn(image);
    }
  } catch (const std::exception& e) {
    out.failure = e.what();
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

double overall_error(std::span<const RunResult> runs) {
  if (runs.empty()) throw ConfigError("no runs to average");
  double sum = 0.0;
  for (const auto& r : runs) {
    if (r.records.size() != runs.front().records.size()) {
      throw DataError("runs have different lengths");
    }
    sum += r.error_rate();
  }
  return sum / static_cast<double>(runs.size());
}

ComparisonReport compare(const std::vector<NamedModel>& models,
                         const std::vector<data::Run>& runs, const ImageSource& images,
                         const CompareOptions& options) {
  if (models.empty()) throw ConfigError("no models to compare");
  if (runs.empty()) throw ConfigError("no runs to evaluate");
  const std::size_t length = runs.front().size();
  for (const auto& run : runs) {
    if (run.size() != length) throw DataError("runs have different lengths");
  }

  ComparisonReport report;
  report.runs_fingerprint = data::fingerprint(runs);
  for (const auto& m : models) {
    if (m.runs != nullptr && data::fingerprint(*m.runs) != report.runs_fingerprint) {
      throw DataError("model " + m.name + " was given a different run list");
    }
  }

  const std::size_t tasks = models.size() * runs.size();
  report.results.assign(models.size(), std::vector<RunResult>(runs.size()));
  std::atomic<std::size_t> next{0};
  std::mutex done;
  auto work = [&] {
    for (std::size_t t = next++; t < tasks; t = next++) {
      const std::size_t m = t % models.size();
      const std::size_t r = t / models.size();
      std::vector<LabeledImage> sequence;
      sequence.reserve(length);
      for (std::size_t index : runs[r]) sequence.push_back(images(index));
      RunResult result;
      try {
        auto model = models[m].factory();
        result = run_incremental(*model, sequence, r, models[m].name);
      } catch (const std::exception& e) {
        result.model = models[m].name;
        result.failure = e.what();
      }
      std::lock_guard lock(done);
      report.results[m][r] = std::move(result);
      if (options.on_run) options.on_run(report.results[m][r]);
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(options.workers, tasks));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }

  for (std::size_t m = 0; m < models.size(); ++m) {
    for (std::size_t r = 0; r < runs.size(); ++r) {
      const auto& result = report.results[m][r];
      if (result.failure) {
        throw Error("model " + models[m].name + " failed on run " + std::to_string(r) + " at step " +
                    std::to_string(result.records.size()) + ": " + *result.failure);
      }
    }
  }

  const double n = static_cast<double>(runs.size());
  std::vector<double> steps(length);
  for (std::size_t s = 0; s < length; ++s) steps[s] = static_cast<double>(s + 1);
  for (std::size_t m = 0; m < models.size(); ++m) {
    const auto& results = report.results[m];
    std::vector<double> per_run;
    double seconds = 0.0;
    for (const auto& r : results) {
      per_run.push_back(r.error_rate());
      seconds += r.seconds;
    }
    OverallRow row;
    row.model = models[m].name;
    row.mean_error = overall_error(results);
    row.ci = bootstrap_ci(per_run, options.bootstrap_resamples, options.level,
                          data::derive_seed(options.seed, 0));
    row.runs = runs.size();
    row.wall_clock_mean = seconds / n;
    report.overall.push_back(row);

    std::vector<double> means(length);
    std::vector<double> outcomes(runs.size());
    std::vector<CurveRow> rows(length);
    for (std::size_t s = 0; s < length; ++s) {
      double wrong = 0.0;
      for (std::size_t r = 0; r < runs.size(); ++r) {
        outcomes[r] = results[r].records[s].correct ? 0.0 : 1.0;
        wrong += outcomes[r];
      }
      means[s] = wrong / n;
      rows[s].model = models[m].name;
      rows[s].step = s + 1;
      rows[s].mean_error = means[s];
      rows[s].ci = bootstrap_ci(outcomes, options.bootstrap_resamples, options.level,
                                data::derive_seed(options.seed, s + 1));
    }
    const auto smooth = lowess(steps, means, options.lowess_frac);
    for (std::size_t s = 0; s < length; ++s) {
      rows[s].lowess = smooth[s];
      report.curve.push_back(rows[s]);
    }
  }
  return report;
}

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return buf;
}

std::string overall_csv(const ComparisonReport& report) {
  std::string out = "model,meanError,ciLow,ciHigh,runs\n";
  for (const auto& r : report.overall) {
    out += r.model + "," + format_number(r.mean_error) + "," + format_number(r.ci.low) + "," +
           format_number(r.ci.high) + "," + std::to_string(r.runs) + "\n";
  }
  return out;
}

std::string curve_csv(const ComparisonReport& report) {
  std::string out = "model,step,meanError,lowess,ciLow,ciHigh\n";
  for (const auto& r : report.curve) {
    out += r.model + "," + std::to_string(r.step) + "," + format_number(r.mean_error) + "," +
           format_number(r.lowess) + "," + format_number(r.ci.low) + "," +
           format_number(r.ci.high) + "\n";
  }
  return out;
}

std::string timing_csv(const ComparisonReport& report) {
  std::string out = "model,run,seconds\n";
  for (const auto& results : report.results) {
    for (std::size_t r = 0; r < results.size(); ++r) {
      out += results[r].model + "," + std::to_string(r) + "," + format_number(results[r].seconds) +
             "\n";
    }
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) throw DataError("cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw DataError("cannot write " + path.string());
  }
}

}  // namespace cobweb::eval
