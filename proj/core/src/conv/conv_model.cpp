#include "cobweb/conv/conv_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "cobweb/conv/patch.hpp"
#include "cobweb/error.hpp"
#include "cobweb/tree_io.hpp"
#include "json_io.hpp"

namespace cobweb::conv {
namespace {

constexpr std::string_view kLabel = "label";
constexpr std::string_view kFilterPrefix = "filter@";

std::optional<NodeId> parse_id(std::string_view text) {
  NodeId id = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), id);
  if (ec != std::errc{} || end != text.data() + text.size() || text.empty()) return std::nullopt;
  return id;
}

// depth1[id] for every live filter node; kNoNode for deleted ids.
std::vector<NodeId> depth1_table(const CobwebTree& filters) {
  std::vector<NodeId> out(filters.next_id(), kNoNode);
  const NodeId root = filters.root();
  for (NodeId id : filters.depth_first()) {
    const NodeId parent = filters.node(id).parent;
    if (id == root) {
      out[id] = root;
    } else if (parent == root) {
      out[id] = id;
    } else {
      out[id] = out[parent];
    }
  }
  return out;
}

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os.precision(digits);
  os << std::fixed << v;
  return os.str();
}

}  // namespace

std::string filter_attribute(std::size_t row, std::size_t col) {
  return std::string(kFilterPrefix) + "(" + std::to_string(row) + "," + std::to_string(col) + ")";
}

NodeId depth1_label(const CobwebTree& filters, NodeId id) {
  const NodeId root = filters.root();
  NodeId at = id;
  while (true) {
    const ConceptNode& n = filters.node(at);  // throws for stale ids
    if (at == root || n.parent == root) return at;
    at = n.parent;
  }
}

Instance EncodedInstance::to_instance() const {
  Instance out;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      out.set(filter_attribute(r, c), std::to_string(filters[r * cols + c]));
    }
  }
  if (label) out.set(std::string(kLabel), *label);
  return out;
}

// Buckets classifier symbols by the depth-1 ancestor of the filter they
// name. Extra symbols (query-time ids not yet interned) follow the
// registered ones.
class ConvCobwebModel::Remap final : public NominalRemap {
 public:
  Remap(const ConvCobwebModel& model, const std::vector<NodeId>& extra)
      : model_(model), depth1_(depth1_table(model.filters_)) {
    const auto& symbols = model.classifier_.symbols();
    buckets_.resize(symbols.size() + extra.size(), 0);
    for (Symbol s = 0; s < symbols.size(); ++s) buckets_[s] = lookup(parse_id(symbols.name(s)));
    for (std::size_t i = 0; i < extra.size(); ++i) buckets_[symbols.size() + i] = lookup(extra[i]);
  }

  bool remaps(std::uint32_t slot) const override { return model_.is_filter_slot(slot); }
  std::size_t bucket_count() const override { return depth1_.size(); }
  std::size_t bucket(Symbol symbol) const override { return buckets_[symbol]; }

 private:
  // Non-filter symbols (labels that are not ids) land in bucket 0; they
  // never occur in filter slots.
  std::size_t lookup(std::optional<NodeId> id) const {
    if (!id || *id >= depth1_.size() || depth1_[*id] == kNoNode) return 0;
    return depth1_[*id];
  }

  const ConvCobwebModel& model_;
  std::vector<NodeId> depth1_;
  std::vector<std::size_t> buckets_;
};

ConvCobwebModel::ConvCobwebModel(std::size_t filter_size, double acuity, TieBreak filter_ties)
    : k_(filter_size), filters_(acuity, filter_ties), classifier_(acuity, TieBreak::kPrecedence) {
  if (k_ == 0) throw ConfigError("filter size must be positive");
  for (std::size_t r = 0; r < k_; ++r) {
    for (std::size_t c = 0; c < k_; ++c) filters_.continuous_slot(patch_attribute(r, c));
  }
}

bool ConvCobwebModel::is_filter_slot(std::uint32_t slot) const {
  return grid_rows_ > 0 && slot >= first_filter_slot_ &&
         slot < first_filter_slot_ + grid_rows_ * grid_cols_;
}

void ConvCobwebModel::check_layout(const LabeledImage& image) const {
  if (image.pixels.size() != image.rows * image.cols) {
    throw DataError("image has " + std::to_string(image.pixels.size()) + " pixels, expected " +
                    std::to_string(image.rows * image.cols));
  }
  if (k_ > image.rows || k_ > image.cols) {
    throw ConfigError("filter size " + std::to_string(k_) + " does not fit a " +
                      std::to_string(image.rows) + "x" + std::to_string(image.cols) + " image");
  }
  if (grid_rows_ > 0 &&
      (image.rows - k_ + 1 != grid_rows_ || image.cols - k_ + 1 != grid_cols_)) {
    throw DataError("image is " + std::to_string(image.rows) + "x" + std::to_string(image.cols) +
                    ", earlier images were " + std::to_string(grid_rows_ + k_ - 1) + "x" +
                    std::to_string(grid_cols_ + k_ - 1));
  }
}

void ConvCobwebModel::register_layout(std::size_t rows, std::size_t cols) {
  if (grid_rows_ > 0) return;
  grid_rows_ = rows - k_ + 1;
  grid_cols_ = cols - k_ + 1;
  label_slot_ = classifier_.nominal_slot(kLabel);
  first_filter_slot_ = classifier_.nominal_slot(filter_attribute(0, 0));
  for (std::size_t r = 0; r < grid_rows_; ++r) {
    for (std::size_t c = 0; c < grid_cols_; ++c) {
      const auto slot = classifier_.nominal_slot(filter_attribute(r, c));
      if (slot != first_filter_slot_ + r * grid_cols_ + c) {
        throw InvariantError("classifier filter slots are not contiguous");
      }
    }
  }
}

CompiledInstance ConvCobwebModel::patch_instance(const LabeledImage& image, std::size_t r,
                                                 std::size_t c) const {
  CompiledInstance out;
  out.continuous.reserve(k_ * k_);
  for (std::size_t i = 0; i < k_; ++i) {
    for (std::size_t j = 0; j < k_; ++j) {
      out.continuous.emplace_back(static_cast<std::uint32_t>(i * k_ + j), image.at(r + i, c + j));
    }
  }
  return out;
}

EncodedInstance ConvCobwebModel::encode_image(const LabeledImage& image) {
  check_layout(image);
  EncodedInstance out{image.rows - k_ + 1, image.cols - k_ + 1, {}, image.label};
  out.filters.reserve(out.rows * out.cols);
  for (std::size_t r = 0; r < out.rows; ++r) {
    for (std::size_t c = 0; c < out.cols; ++c) {
      out.filters.push_back(filters_.ifit_compiled(patch_instance(image, r, c)));
    }
  }
  return out;
}

EncodedInstance ConvCobwebModel::encode_query(const LabeledImage& image) const {
  check_layout(image);
  EncodedInstance out{image.rows - k_ + 1, image.cols - k_ + 1, {}, image.label};
  out.filters.reserve(out.rows * out.cols);
  for (std::size_t r = 0; r < out.rows; ++r) {
    for (std::size_t c = 0; c < out.cols; ++c) {
      out.filters.push_back(filters_.categorize_compiled(patch_instance(image, r, c)));
    }
  }
  return out;
}

NodeId ConvCobwebModel::fit_image(const LabeledImage& image) {
  if (!image.label) throw DataError("cannot fit an unlabeled image");
  check_layout(image);
  register_layout(image.rows, image.cols);
  const EncodedInstance encoded = encode_image(image);

  CompiledInstance instance;
  instance.nominal.reserve(encoded.filters.size() + 1);
  instance.nominal.emplace_back(label_slot_, classifier_.intern(*encoded.label));
  for (std::size_t i = 0; i < encoded.filters.size(); ++i) {
    instance.nominal.emplace_back(first_filter_slot_ + static_cast<std::uint32_t>(i),
                                  classifier_.intern(std::to_string(encoded.filters[i])));
  }
  instance.sort();
  const Remap remap(*this, {});
  return classifier_.ifit_compiled(instance, &remap);
}

NodeId ConvCobwebModel::categorize_image(const LabeledImage& image) const {
  if (grid_rows_ == 0 || classifier_.node(classifier_.root()).count == 0) {
    check_layout(image);
    return classifier_.root();
  }
  const EncodedInstance encoded = encode_query(image);

  const auto& symbols = classifier_.symbols();
  std::vector<NodeId> extra;
  CompiledInstance instance;
  instance.nominal.reserve(encoded.filters.size());
  for (std::size_t i = 0; i < encoded.filters.size(); ++i) {
    const NodeId id = encoded.filters[i];
    Symbol s;
    if (auto known = symbols.find(std::to_string(id))) {
      s = *known;
    } else {
      auto it = std::find(extra.begin(), extra.end(), id);
      s = static_cast<Symbol>(symbols.size() + (it - extra.begin()));
      if (it == extra.end()) extra.push_back(id);
    }
    instance.nominal.emplace_back(first_filter_slot_ + static_cast<std::uint32_t>(i), s);
  }
  const Remap remap(*this, extra);
  return classifier_.categorize_compiled(instance, &remap);
}

std::optional<std::string> ConvCobwebModel::predict_image(const LabeledImage& image) const {
  const NodeId terminal = categorize_image(image);
  if (grid_rows_ == 0) return std::nullopt;
  if (auto symbol = classifier_.predict_nominal(terminal, label_slot_)) {
    return classifier_.symbols().name(*symbol);
  }
  return std::nullopt;
}

std::unique_ptr<NominalRemap> ConvCobwebModel::classifier_remap() const {
  return std::make_unique<Remap>(*this, std::vector<NodeId>{});
}

CountView ConvCobwebModel::counts(const ConceptNode& node) const {
  CountView out;
  const auto& names = classifier_.attributes().nominal_names();
  for (std::uint32_t slot = 0; slot < node.nominal.size(); ++slot) {
    if (node.nominal[slot].empty()) continue;
    auto& table = out[names[slot]];
    for (const auto& vc : node.nominal[slot]) table[classifier_.symbols().name(vc.symbol)] += vc.count;
  }
  return out;
}

CountView ConvCobwebModel::remap(const CountView& view) const {
  CountView out;
  for (const auto& [attr, table] : view) {
    if (!attr.starts_with(kFilterPrefix)) {
      out[attr] = table;
      continue;
    }
    auto& target = out[attr];
    for (const auto& [value, count] : table) {
      const auto id = parse_id(value);
      if (!id) throw DataError("filter value '" + value + "' is not a node id");
      target[std::to_string(depth1_label(filters_, *id))] += count;
    }
  }
  return out;
}

void ConvCobwebModel::check_references() const {
  const auto& symbols = classifier_.symbols();
  for (NodeId id : classifier_.depth_first()) {
    const ConceptNode& n = classifier_.node(id);
    for (std::uint32_t slot = 0; slot < n.nominal.size(); ++slot) {
      if (!is_filter_slot(slot)) continue;
      for (const auto& vc : n.nominal[slot]) {
        const auto filter = parse_id(symbols.name(vc.symbol));
        if (!filter || !filters_.contains(*filter) || !filters_.node(*filter).is_leaf()) {
          throw InvariantError("classifier node " + std::to_string(id) +
                               " references filter '" + symbols.name(vc.symbol) +
                               "', which is not a live leaf");
        }
      }
    }
  }
}

std::string ConvCobwebModel::to_json() const {
  nlohmann::json doc;
  doc["format"] = "conv-cobweb-model";
  doc["formatVersion"] = kModelFormatVersion;
  doc["filterSize"] = k_;
  doc["gridRows"] = grid_rows_;
  doc["gridCols"] = grid_cols_;
  doc["filters"] = detail::tree_document(filters_);
  doc["classifier"] = detail::tree_document(classifier_);
  return doc.dump();
}

ConvCobwebModel ConvCobwebModel::from_json(std::string_view document) {
  const auto doc = detail::parse_document(document);
  try {
    if (doc.at("format").get<std::string>() != "conv-cobweb-model") {
      throw DataError("not a conv-cobweb-model document");
    }
    const int version = doc.at("formatVersion").get<int>();
    if (version != kModelFormatVersion) {
      throw DataError("unsupported model formatVersion " + std::to_string(version));
    }
    const auto k = doc.at("filterSize").get<std::size_t>();
    if (k == 0) throw DataError("filterSize must be positive");
    ConvCobwebModel model(k);
    model.filters_ = detail::tree_from_document(doc.at("filters"));
    model.classifier_ = detail::tree_from_document(doc.at("classifier"));
    const auto& names = model.filters_.attributes().continuous_names();
    if (model.filters_.attributes().nominal_names().size() != 0 || names.size() != k * k) {
      throw DataError("filter tree attributes do not match filterSize");
    }
    for (std::size_t r = 0; r < k; ++r) {
      for (std::size_t c = 0; c < k; ++c) {
        if (names[r * k + c] != patch_attribute(r, c)) {
          throw DataError("filter tree attribute order does not match filterSize");
        }
      }
    }
    const auto rows = doc.at("gridRows").get<std::size_t>();
    const auto cols = doc.at("gridCols").get<std::size_t>();
    if ((rows == 0) != (cols == 0)) throw DataError("inconsistent patch grid");
    if (rows > 0) {
      const auto& attrs = model.classifier_.attributes();
      const auto label = attrs.find(kLabel);
      const auto first = attrs.find(filter_attribute(0, 0));
      if (!label || !first || attrs.nominal_names().size() != rows * cols + 1) {
        throw DataError("classifier attributes do not match the patch grid");
      }
      model.grid_rows_ = rows;
      model.grid_cols_ = cols;
      model.label_slot_ = label->index;
      model.first_filter_slot_ = first->index;
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
          const auto slot = attrs.find(filter_attribute(r, c));
          if (!slot || slot->index != first->index + r * cols + c) {
            throw DataError("classifier filter attributes are out of order");
          }
        }
      }
    } else if (model.classifier_.attributes().nominal_count() != 0) {
      throw DataError("classifier has attributes but no patch grid");
    }
    try {
      model.check_references();
    } catch (const InvariantError& e) {
      throw DataError(e.what());
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed model document: ") + e.what());
  }
}

std::string ConvCobwebModel::filters_dot() const {
  const std::size_t k = k_;
  return to_dot(filters_, "filters", [k](const CobwebTree&, const ConceptNode& n) {
    std::string label = "id " + std::to_string(n.id) + "|count " + std::to_string(n.count);
    if (n.count == 0) return label;
    for (std::size_t r = 0; r < k; ++r) {
      label += "|{";
      for (std::size_t c = 0; c < k; ++c) {
        const GaussianStat* st = n.stat(static_cast<std::uint32_t>(r * k + c));
        if (c > 0) label += "|";
        label += st != nullptr ? fixed(st->mean, 2) : "-";
      }
      label += "}";
    }
    return label;
  });
}

std::string ConvCobwebModel::classifier_dot() const {
  const auto slot = label_slot_;
  const bool trained = grid_rows_ > 0;
  return to_dot(classifier_, "classifier", [slot, trained](const CobwebTree& tree,
                                                          const ConceptNode& n) {
    std::string label = "id " + std::to_string(n.id) + "|count " + std::to_string(n.count);
    if (!trained || slot >= n.nominal.size()) return label;
    std::vector<ValueCount> counts = n.nominal[slot];
    std::stable_sort(counts.begin(), counts.end(), [&](const ValueCount& a, const ValueCount& b) {
      if (a.count != b.count) return a.count > b.count;
      return tree.symbols().name(a.symbol) < tree.symbols().name(b.symbol);
    });
    for (const auto& vc : counts) {
      label += "|label=" + tree.symbols().name(vc.symbol) + ": " +
               fixed(static_cast<double>(vc.count) / static_cast<double>(n.count), 3);
    }
    return label;
  });
}

}  // namespace cobweb::conv
