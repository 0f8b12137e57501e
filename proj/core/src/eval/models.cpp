#include "cobweb/eval/models.hpp"

#include <json.hpp>

#include "cobweb/error.hpp"
#include "cobweb/tree_io.hpp"

namespace cobweb::eval {
namespace {

constexpr std::string_view kLabel = "label";
constexpr std::string_view kFormat = "cobweb3-image-model";

std::string pixel_attribute(std::size_t r, std::size_t c) {
  return "pixel@(" + std::to_string(r) + "," + std::to_string(c) + ")";
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  return kind == ModelKind::kCobweb3 ? "cobweb3" : "convcobweb";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "cobweb3") return ModelKind::kCobweb3;
  if (name == "convcobweb") return ModelKind::kConvCobweb;
  throw ConfigError("unknown model '" + std::string(name) + "' (expected cobweb3 or convcobweb)");
}

Cobweb3ImageModel::Cobweb3ImageModel(double acuity) : tree_(acuity) {
  if (!(acuity > 0.0)) throw ConfigError("acuity must be positive");
  label_slot_ = tree_.nominal_slot(kLabel);
}

void Cobweb3ImageModel::check_layout(const LabeledImage& image) const {
  if (image.pixels.size() != image.rows * image.cols || image.pixels.empty()) {
    throw DataError("image has " + std::to_string(image.pixels.size()) + " pixels, expected " +
                    std::to_string(image.rows * image.cols));
  }
  if (rows_ > 0 && (image.rows != rows_ || image.cols != cols_)) {
    throw DataError("image is " + std::to_string(image.rows) + "x" + std::to_string(image.cols) +
                    ", earlier images were " + std::to_string(rows_) + "x" +
                    std::to_string(cols_));
  }
}

CompiledInstance Cobweb3ImageModel::pixels(const LabeledImage& image) const {
  CompiledInstance out;
  out.continuous.reserve(image.pixels.size());
  for (std::size_t i = 0; i < image.pixels.size(); ++i) {
    out.continuous.emplace_back(static_cast<std::uint32_t>(i), image.pixels[i]);
  }
  return out;
}

std::optional<std::string> Cobweb3ImageModel::predict(const LabeledImage& image) const {
  check_layout(image);
  if (rows_ == 0) return std::nullopt;
  const auto symbol = tree_.predict_nominal(tree_.categorize_compiled(pixels(image)), label_slot_);
  if (!symbol) return std::nullopt;
  return tree_.symbols().name(*symbol);
}

void Cobweb3ImageModel::learn(const LabeledImage& image) {
  if (!image.label) throw DataError("cannot fit an unlabeled image");
  check_layout(image);
  if (rows_ == 0) {
    rows_ = image.rows;
    cols_ = image.cols;
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t c = 0; c < cols_; ++c) {
        if (tree_.continuous_slot(pixel_attribute(r, c)) != r * cols_ + c) {
          throw InvariantError("pixel slots are not dense");
        }
      }
    }
  }
  auto inst = pixels(image);
  inst.nominal.emplace_back(label_slot_, tree_.intern(*image.label));
  tree_.ifit_compiled(inst);
}

std::string Cobweb3ImageModel::to_json() const {
  nlohmann::ordered_json doc;
  doc["format"] = kFormat;
  doc["formatVersion"] = kImageModelFormatVersion;
  doc["rows"] = rows_;
  doc["cols"] = cols_;
  doc["tree"] = nlohmann::ordered_json::parse(tree_to_json(tree_));
  return doc.dump(2) + "\n";
}

Cobweb3ImageModel Cobweb3ImageModel::from_json(std::string_view document) {
  try {
    const auto doc = nlohmann::ordered_json::parse(document);
    if (doc.at("format").get<std::string>() != kFormat) {
      throw DataError("not a " + std::string(kFormat) + " document");
    }
    if (doc.at("formatVersion").get<int>() != kImageModelFormatVersion) {
      throw DataError("unsupported formatVersion " + doc.at("formatVersion").dump());
    }
    Cobweb3ImageModel model;
    model.tree_ = tree_from_json(doc.at("tree").dump());
    const auto slot = model.tree_.attributes().find(kLabel);
    if (!slot || slot->kind != AttributeKind::kNominal) throw DataError("tree has no nominal label");
    model.label_slot_ = slot->index;
    model.rows_ = doc.at("rows").get<std::size_t>();
    model.cols_ = doc.at("cols").get<std::size_t>();
    const auto& names = model.tree_.attributes().continuous_names();
    if (names.size() != model.rows_ * model.cols_) throw DataError("pixel attributes do not match rows x cols");
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] != pixel_attribute(i / model.cols_, i % model.cols_)) {
        throw DataError("unexpected attribute " + names[i]);
      }
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed model document: ") + e.what());
  }
}

ConvImageModel::ConvImageModel(const ModelOptions& options)
    : model_(options.filter_size, options.acuity) {}

std::unique_ptr<IncrementalModel> make_model(ModelKind kind, const ModelOptions& options) {
  if (kind == ModelKind::kCobweb3) return std::make_unique<Cobweb3ImageModel>(options.acuity);
  return std::make_unique<ConvImageModel>(options);
}

}  // namespace cobweb::eval
