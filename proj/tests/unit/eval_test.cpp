#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <gtest/gtest.h>

#include "cobweb/data/rng.hpp"
#include "cobweb/error.hpp"
#include "cobweb/eval/harness.hpp"
#include "cobweb/eval/models.hpp"
#include "cobweb/eval/stats.hpp"

namespace cobweb::eval {
namespace {

LabeledImage tiny(double v, std::string label) { return LabeledImage{1, 1, {v}, std::move(label)}; }

LabeledImage small_image(std::size_t seed, std::string label) {
  LabeledImage img{5, 5, std::vector<double>(25), std::move(label)};
  data::Rng rng(seed);
  for (auto& p : img.pixels) p = rng.unit() * 4.0 - 2.0;
  return img;
}

// Records every call; predicts whatever it learnt last.
class SpyModel : public IncrementalModel {
 public:
  explicit SpyModel(std::vector<std::string>* log) : log_(log) {}
  std::optional<std::string> predict(const LabeledImage& image) const override {
    log_->push_back("predict " + std::to_string(image.pixels[0]) + (image.label ? " labelled" : ""));
    return last_;
  }
  void learn(const LabeledImage& image) override {
    log_->push_back("learn " + std::to_string(image.pixels[0]));
    last_ = image.label;
  }
  std::string to_json() const override { return "{}"; }

 private:
  std::vector<std::string>* log_;
  std::optional<std::string> last_;
};

class MajorityModel : public IncrementalModel {
 public:
  std::optional<std::string> predict(const LabeledImage&) const override {
    if (counts_.empty()) return std::nullopt;
    auto best = counts_.begin();
    for (auto it = counts_.begin(); it != counts_.end(); ++it) {
      if (it->second > best->second) best = it;
    }
    return best->first;
  }
  void learn(const LabeledImage& image) override { ++counts_[*image.label]; }
  std::string to_json() const override { return "{}"; }

 private:
  std::map<std::string, int> counts_;
};

class Memorizer : public IncrementalModel {
 public:
  std::optional<std::string> predict(const LabeledImage& image) const override {
    auto it = seen_.find(image.pixels);
    if (it == seen_.end()) return std::nullopt;
    return it->second;
  }
  void learn(const LabeledImage& image) override { seen_[image.pixels] = *image.label; }
  std::string to_json() const override { return "{}"; }

 private:
  std::map<std::vector<double>, std::string> seen_;
};

class RandomGuesser : public IncrementalModel {
 public:
  explicit RandomGuesser(std::uint64_t seed) : rng_(seed) {}
  std::optional<std::string> predict(const LabeledImage&) const override {
    return std::to_string(rng_.below(10));
  }
  void learn(const LabeledImage&) override {}
  std::string to_json() const override { return "{}"; }

 private:
  mutable data::Rng rng_;
};

class FailsAt : public IncrementalModel {
 public:
  explicit FailsAt(std::size_t step) : step_(step) {}
  std::optional<std::string> predict(const LabeledImage&) const override { return "0"; }
  void learn(const LabeledImage&) override {
    if (++learnt_ == step_) throw DataError("boom");
  }
  std::string to_json() const override { return "{}"; }

 private:
  std::size_t step_;
  std::size_t learnt_ = 0;
};

TEST(RunIncremental, UntrainedSingleImage) {
  Cobweb3ImageModel model;
  const std::vector<LabeledImage> seq{small_image(1, "4")};
  const auto result = run_incremental(model, seq);
  ASSERT_EQ(result.records.size(), 1u);
  EXPECT_EQ(result.records[0].predicted, std::nullopt);
  EXPECT_FALSE(result.records[0].correct);
  EXPECT_EQ(result.records[0].step, 1u);
}

TEST(RunIncremental, DuplicatesGiveOneOverK) {
  const std::vector<LabeledImage> seq(10, small_image(2, "6"));
  Cobweb3ImageModel cobweb3;
  EXPECT_DOUBLE_EQ(run_incremental(cobweb3, seq).error_rate(), 0.1);
  ConvImageModel conv;
  const auto result = run_incremental(conv, seq);
  EXPECT_DOUBLE_EQ(result.error_rate(), 0.1);
  for (std::size_t i = 1; i < 10; ++i) EXPECT_TRUE(result.records[i].correct);
}

TEST(RunIncremental, PredictsBeforeLearning) {
  std::vector<std::string> log;
  SpyModel spy(&log);
  const std::vector<LabeledImage> seq{tiny(1, "a"), tiny(2, "b"), tiny(3, "b")};
  const auto result = run_incremental(spy, seq, 4, "spy");
  const std::vector<std::string> expected{"predict 1.000000", "learn 1.000000",
                                          "predict 2.000000", "learn 2.000000",
                                          "predict 3.000000", "learn 3.000000"};
  EXPECT_EQ(log, expected);
  ASSERT_EQ(result.records.size(), 3u);
  EXPECT_EQ(result.records[1].predicted, "a");
  EXPECT_FALSE(result.records[1].correct);
  EXPECT_TRUE(result.records[2].correct);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(result.records[i].run, 4u);
    EXPECT_EQ(result.records[i].step, i + 1);
  }
}

TEST(RunIncremental, FailureKeepsPartialRecords) {
  FailsAt model(3);
  const std::vector<LabeledImage> seq(6, tiny(0, "0"));
  const auto result = run_incremental(model, seq);
  ASSERT_TRUE(result.failure.has_value());
  EXPECT_EQ(*result.failure, "boom");
  EXPECT_EQ(result.records.size(), 3u);
}

RunResult with_errors(std::size_t wrong, std::size_t total) {
  RunResult r;
  for (std::size_t i = 0; i < total; ++i) {
    r.records.push_back({0, i + 1, "1", i < wrong ? "2" : "1", i >= wrong});
  }
  return r;
}

TEST(OverallError, Examples) {
  EXPECT_DOUBLE_EQ(overall_error(std::vector{with_errors(0, 10)}), 0.0);
  EXPECT_NEAR(overall_error(std::vector{with_errors(2, 10), with_errors(4, 10)}), 0.3, 1e-15);
  EXPECT_THROW(overall_error(std::vector<RunResult>{}), ConfigError);
  EXPECT_THROW(overall_error(std::vector{with_errors(1, 10), with_errors(1, 9)}), DataError);
}

TEST(OverallError, RandomGuessingIsNearChance) {
  std::vector<RunResult> runs;
  data::Rng labels(11);
  for (std::size_t r = 0; r < 50; ++r) {
    RandomGuesser model(data::derive_seed(3, r));
    std::vector<LabeledImage> seq;
    for (int i = 0; i < 300; ++i) seq.push_back(tiny(0, std::to_string(i % 10)));
    labels.shuffle(std::span<LabeledImage>(seq));
    runs.push_back(run_incremental(model, seq, r));
  }
  EXPECT_NEAR(overall_error(runs), 0.9, 0.03);
}

TEST(Quantile, MatchesLinearInterpolation) {
  const std::vector<double> a{1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(quantile_sorted(a, 0.25), 1.75);
  const std::vector<double> b{1, 1, 3, 4, 5};
  EXPECT_DOUBLE_EQ(quantile_sorted(b, 0.9), 4.6);
  EXPECT_DOUBLE_EQ(quantile_sorted(b, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile_sorted(b, 1.0), 5.0);
}

TEST(Bootstrap, ConstantGivesZeroWidth) {
  for (double c : {0.0, 0.37, 1.0}) {
    const std::vector<double> v(7, c);
    const auto ci = bootstrap_ci(v, 10000, 0.95, 1);
    EXPECT_EQ(ci.low, c);
    EXPECT_EQ(ci.high, c);
  }
}

TEST(Bootstrap, BoundsAndDeterminism) {
  const std::vector<double> v{0, 1};
  const auto ci = bootstrap_ci(v, 20000, 0.95, 5);
  EXPECT_GE(ci.low, 0.0);
  EXPECT_LE(ci.high, 1.0);
  EXPECT_LE(ci.low, 0.5);
  EXPECT_GE(ci.high, 0.5);
  const auto again = bootstrap_ci(v, 20000, 0.95, 5);
  EXPECT_EQ(ci.low, again.low);
  EXPECT_EQ(ci.high, again.high);

  const std::vector<double> w{0.1, 0.4, 0.2, 0.5, 0.3};
  const auto c = bootstrap_ci(w, 5000, 0.9, 2);
  EXPECT_LE(c.low, 0.3);
  EXPECT_GE(c.high, 0.3);
  EXPECT_LT(c.low, c.high);
}

TEST(Bootstrap, RejectsBadArguments) {
  const std::vector<double> v{1.0};
  EXPECT_THROW(bootstrap_ci({}, 10, 0.95, 0), ConfigError);
  EXPECT_THROW(bootstrap_ci(v, 0, 0.95, 0), ConfigError);
  EXPECT_THROW(bootstrap_ci(v, 10, 1.0, 0), ConfigError);
  EXPECT_THROW(bootstrap_ci(v, 10, 0.0, 0), ConfigError);
}

TEST(Lowess, ReproducesLines) {
  std::vector<double> x;
  std::vector<double> y;
  for (int i = 1; i <= 57; ++i) {
    x.push_back(i);
    y.push_back(0.9 - 0.0123 * i);
  }
  for (double frac : {0.1, 0.3, 1.0}) {
    const auto fit = lowess(x, y, frac);
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(fit[i], y[i], 1e-9);
  }
  const std::vector<double> c(20, 0.4);
  const auto flat = lowess(std::span(x).first(20), c, 0.3);
  for (double v : flat) EXPECT_NEAR(v, 0.4, 1e-12);
}

// Reference values produced once by statsmodels 0.14 (lowess, delta = 0).
TEST(Lowess, MatchesFrozenReference) {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> y{1, 0, 1, 1, 0};
  const std::vector<double> expected{0.653419842041412, 0.664612258731673, 0.7136894824707847,
                                     0.5692322635962667, 0.31013655872979706};
  const auto fit = lowess(x, y, 1.0);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(fit[i], expected[i], 1e-9);

  const std::vector<double> x10{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const std::vector<double> y10{1, 1, 0, 1, 0, 0, 1, 0, 0, 0};
  // Windows of three evenly spaced points leave only the centre weighted.
  EXPECT_EQ(lowess(x10, y10, 0.3), y10);
  const std::vector<double> robust{1.0096677353634884, 0.8079361927045785, 0.6247180149398054,
                                   0.38184512558399175, 0.3002320782553031, 0.2712529451557041,
                                   0.19909138335392162, 0.19162033998868258, 0.06167530996435165,
                                   -0.07422139483893057};
  const auto r = lowess(x10, y10, 0.6, 2);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(r[i], robust[i], 1e-9);
}

TEST(Lowess, EdgeCases) {
  const std::vector<double> one{3.0};
  EXPECT_EQ(lowess(one, one, 0.5), one);
  EXPECT_THROW(lowess(one, one, 0.0), ConfigError);
  EXPECT_THROW(lowess(one, one, 1.5), ConfigError);
}

// Ten distinct 1x1 images; sequences repeat two of them heavily.
struct Toy {
  std::vector<LabeledImage> images;
  std::vector<data::Run> runs;
};

Toy toy_set() {
  Toy t;
  for (int i = 0; i < 10; ++i) t.images.push_back(tiny(i, std::to_string(i % 3)));
  data::Rng rng(8);
  for (int r = 0; r < 6; ++r) {
    data::Run run;
    for (int s = 0; s < 40; ++s) run.push_back(s % 4 == 0 ? rng.below(10) : rng.below(2) * 5);
    t.runs.push_back(run);
  }
  return t;
}

CompareOptions small_options(std::size_t workers = 1) {
  CompareOptions o;
  o.seed = 17;
  o.bootstrap_resamples = 500;
  o.workers = workers;
  return o;
}

TEST(Compare, ShapeAndIdenticalModels) {
  const auto toy = toy_set();
  const ImageSource source = [&](std::size_t i) { return toy.images[i]; };
  const std::vector<NamedModel> models{
      {"a", [] { return std::make_unique<Memorizer>(); }},
      {"b", [] { return std::make_unique<Memorizer>(); }}};
  const auto report = compare(models, toy.runs, source, small_options());
  ASSERT_EQ(report.overall.size(), 2u);
  ASSERT_EQ(report.curve.size(), 80u);
  EXPECT_EQ(report.overall[0].mean_error, report.overall[1].mean_error);
  EXPECT_EQ(report.overall[0].ci.low, report.overall[1].ci.low);
  EXPECT_EQ(report.overall[0].ci.high, report.overall[1].ci.high);
  for (std::size_t s = 0; s < 40; ++s) {
    const auto& a = report.curve[s];
    const auto& b = report.curve[40 + s];
    EXPECT_EQ(a.step, s + 1);
    EXPECT_EQ(a.mean_error, b.mean_error);
    EXPECT_EQ(a.lowess, b.lowess);
    EXPECT_EQ(a.ci.low, b.ci.low);
    EXPECT_EQ(a.ci.high, b.ci.high);
    EXPECT_LE(a.ci.low, a.ci.high);
    EXPECT_GE(a.ci.low, 0.0);
    EXPECT_LE(a.ci.high, 1.0);
  }
  const auto csv = overall_csv(report);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "model,meanError,ciLow,ciHigh,runs");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  const auto curve = curve_csv(report);
  EXPECT_EQ(std::count(curve.begin(), curve.end(), '\n'), 81);
}

TEST(Compare, MemorizerBeatsMajority) {
  const auto toy = toy_set();
  const ImageSource source = [&](std::size_t i) { return toy.images[i]; };
  const std::vector<NamedModel> models{
      {"majority", [] { return std::make_unique<MajorityModel>(); }},
      {"memorizer", [] { return std::make_unique<Memorizer>(); }}};
  const auto report = compare(models, toy.runs, source, small_options());
  EXPECT_LT(report.overall[1].mean_error, report.overall[0].mean_error);
}

TEST(Compare, IndependentOfWorkers) {
  const auto toy = toy_set();
  const ImageSource source = [&](std::size_t i) { return toy.images[i]; };
  const std::vector<NamedModel> models{
      {"majority", [] { return std::make_unique<MajorityModel>(); }},
      {"cobweb3", [] { return std::make_unique<Cobweb3ImageModel>(); }}};
  const auto one = compare(models, toy.runs, source, small_options(1));
  const auto three = compare(models, toy.runs, source, small_options(3));
  EXPECT_EQ(overall_csv(one), overall_csv(three));
  EXPECT_EQ(curve_csv(one), curve_csv(three));
  auto reversed = toy.runs;
  std::reverse(reversed.begin(), reversed.end());
  // Run order changes per-run rows but no aggregate.
  const auto rev = compare(models, reversed, source, small_options(2));
  for (std::size_t m = 0; m < 2; ++m) {
    EXPECT_DOUBLE_EQ(rev.overall[m].mean_error, one.overall[m].mean_error);
  }
  for (std::size_t i = 0; i < one.curve.size(); ++i) {
    EXPECT_DOUBLE_EQ(rev.curve[i].mean_error, one.curve[i].mean_error);
    EXPECT_DOUBLE_EQ(rev.curve[i].lowess, one.curve[i].lowess);
  }
}

TEST(Compare, RejectsMismatchedRuns) {
  const auto toy = toy_set();
  auto other = toy.runs;
  other[0][0] = (other[0][0] + 1) % 10;
  const ImageSource source = [&](std::size_t i) { return toy.images[i]; };
  const std::vector<NamedModel> models{
      {"a", [] { return std::make_unique<Memorizer>(); }, &toy.runs},
      {"b", [] { return std::make_unique<Memorizer>(); }, &other}};
  EXPECT_THROW(compare(models, toy.runs, source, small_options()), DataError);
}

TEST(Compare, ReportsFailedRuns) {
  const auto toy = toy_set();
  const ImageSource source = [&](std::size_t i) { return toy.images[i]; };
  const std::vector<NamedModel> models{{"flaky", [] { return std::make_unique<FailsAt>(5); }}};
  try {
    compare(models, toy.runs, source, small_options());
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("flaky"), std::string::npos);
  }
}

TEST(WriteFileAtomic, ReplacesContent) {
  const auto dir = std::filesystem::temp_directory_path() / "cobweb_atomic_test";
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "x.csv", "one\n");
  write_file_atomic(dir / "x.csv", "two\n");
  std::ifstream in(dir / "x.csv");
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), "two\n");
  EXPECT_FALSE(std::filesystem::exists(dir / "x.csv.tmp"));
  EXPECT_THROW(write_file_atomic(dir / "missing" / "x.csv", "a"), DataError);
  std::filesystem::remove_all(dir);
}

TEST(ImageModels, JsonRoundTrip) {
  Cobweb3ImageModel model;
  for (std::size_t i = 0; i < 12; ++i) model.learn(small_image(i, std::to_string(i % 3)));
  const auto text = model.to_json();
  const auto back = Cobweb3ImageModel::from_json(text);
  EXPECT_EQ(back.to_json(), text);
  for (std::size_t i = 20; i < 25; ++i) {
    EXPECT_EQ(back.predict(small_image(i, "0")), model.predict(small_image(i, "0")));
  }
  EXPECT_THROW(Cobweb3ImageModel::from_json("{}"), DataError);
  EXPECT_THROW(model.learn(tiny(1, "1")), DataError);
  EXPECT_EQ(parse_model_kind("convcobweb"), ModelKind::kConvCobweb);
  EXPECT_THROW(parse_model_kind("cnn"), ConfigError);
}

}  // namespace
}  // namespace cobweb::eval
