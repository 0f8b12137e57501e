#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "cobweb/cobweb_tree.hpp"
#include "cobweb/conv/conv_model.hpp"
#include "cobweb/image.hpp"

namespace cobweb::eval {

// Anything that can be run through the predict-then-learn protocol.
class IncrementalModel {
 public:
  virtual ~IncrementalModel() = default;
  // Must not change the model.
  virtual std::optional<std::string> predict(const LabeledImage& image) const = 0;
  virtual void learn(const LabeledImage& image) = 0;
  virtual std::string to_json() const = 0;
};

using ModelFactory = std::function<std::unique_ptr<IncrementalModel>()>;

enum class ModelKind { kCobweb3, kConvCobweb };

std::string_view to_string(ModelKind kind);
// "cobweb3" or "convcobweb"; ConfigError otherwise.
ModelKind parse_model_kind(std::string_view name);

struct ModelOptions {
  double acuity = 1.0;
  std::size_t filter_size = conv::kDefaultFilterSize;
};

inline constexpr int kImageModelFormatVersion = 1;

// Cobweb/3 over raw pixels: one continuous attribute "pixel@(r,c)" per
// pixel plus the nominal "label".
class Cobweb3ImageModel : public IncrementalModel {
 public:
  explicit Cobweb3ImageModel(double acuity = 1.0);

  std::optional<std::string> predict(const LabeledImage& image) const override;
  void learn(const LabeledImage& image) override;
  std::string to_json() const override;
  // DataError on malformed documents.
  static Cobweb3ImageModel from_json(std::string_view document);

  const CobwebTree& tree() const { return tree_; }

 private:
  void check_layout(const LabeledImage& image) const;
  CompiledInstance pixels(const LabeledImage& image) const;

  CobwebTree tree_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::uint32_t label_slot_ = 0;
};

class ConvImageModel : public IncrementalModel {
 public:
  explicit ConvImageModel(const ModelOptions& options = {});
  explicit ConvImageModel(conv::ConvCobwebModel model) : model_(std::move(model)) {}

  std::optional<std::string> predict(const LabeledImage& image) const override {
    return model_.predict_image(image);
  }
  void learn(const LabeledImage& image) override { model_.fit_image(image); }
  std::string to_json() const override { return model_.to_json(); }

  const conv::ConvCobwebModel& model() const { return model_; }

 private:
  conv::ConvCobwebModel model_;
};

std::unique_ptr<IncrementalModel> make_model(ModelKind kind, const ModelOptions& options);

}  // namespace cobweb::eval
