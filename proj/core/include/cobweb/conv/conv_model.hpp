#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cobweb/cobweb_tree.hpp"
#include "cobweb/image.hpp"

namespace cobweb::conv {

inline constexpr int kModelFormatVersion = 1;
inline constexpr std::size_t kDefaultFilterSize = 3;

// "filter@(row,col)"
std::string filter_attribute(std::size_t row, std::size_t col);

// Ancestor of `id` whose parent is the root; the root itself when `id` is
// the root. Throws StaleReferenceError for ids not in `filters`.
NodeId depth1_label(const CobwebTree& filters, NodeId id);

// Attribute name -> value name -> count. Filter values are decimal node ids.
using CountView = std::map<std::string, std::map<std::string, std::uint64_t>>;

// Image encoded as one filter id per patch origin, row-major, plus the label.
struct EncodedInstance {
  std::size_t rows = 0;  // patch grid
  std::size_t cols = 0;
  std::vector<NodeId> filters;
  std::optional<std::string> label;

  // Generic form: "filter@(r,c)" -> id, "label" -> label.
  Instance to_instance() const;
};

// Convolutional Cobweb: a hierarchy of k x k filters learnt from image
// patches, and a classification hierarchy over images encoded as filter
// references. Classifier tables store filter leaf ids; every utility
// computed in the classifier first coarsens them to the filter's depth-1
// ancestor.
//
// fit_image needs exclusive access. predict_image, encode_image(learn =
// false) and the accessors are const and leave both trees untouched.
class ConvCobwebModel {
 public:
  // `filter_ties` applies to the filter tree only; the classifier always
  // uses plain precedence.
  explicit ConvCobwebModel(std::size_t filter_size = kDefaultFilterSize, double acuity = 1.0,
                           TieBreak filter_ties = TieBreak::kSmallest);

  // learn: every patch is fitted into the filter tree and the returned leaf
  // recorded. Otherwise patches are only categorized.
  EncodedInstance encode_image(const LabeledImage& image);
  EncodedInstance encode_query(const LabeledImage& image) const;

  // Throws DataError when the image has no label or its size differs from
  // earlier images. Returns the classifier concept now holding the image.
  NodeId fit_image(const LabeledImage& image);
  std::optional<std::string> predict_image(const LabeledImage& image) const;
  // Classifier concept an unlabeled image sorts to; the root when untrained.
  NodeId categorize_image(const LabeledImage& image) const;

  // Raw and depth-1 count tables of a classifier node.
  CountView counts(const ConceptNode& node) const;
  CountView remap(const CountView& view) const;
  CountView remapped_counts(const ConceptNode& node) const { return remap(counts(node)); }

  // The coarsening applied to classifier utilities, for inspection.
  std::unique_ptr<NominalRemap> classifier_remap() const;

  // Throws InvariantError unless every filter id in the classifier tables
  // is a live leaf of the filter tree.
  void check_references() const;

  const CobwebTree& filters() const { return filters_; }
  const CobwebTree& classifier() const { return classifier_; }
  std::size_t filter_size() const { return k_; }

  std::string to_json() const;
  // Throws DataError on malformed documents.
  static ConvCobwebModel from_json(std::string_view document);

  // Filter nodes show their k x k mean grid, classifier nodes their label
  // distribution.
  std::string filters_dot() const;
  std::string classifier_dot() const;

 private:
  class Remap;

  void register_layout(std::size_t rows, std::size_t cols);
  void check_layout(const LabeledImage& image) const;
  CompiledInstance patch_instance(const LabeledImage& image, std::size_t r, std::size_t c) const;
  bool is_filter_slot(std::uint32_t slot) const;

  std::size_t k_;
  CobwebTree filters_;
  CobwebTree classifier_;
  // Patch grid of the images seen so far; 0 until the first fit.
  std::size_t grid_rows_ = 0;
  std::size_t grid_cols_ = 0;
  std::uint32_t label_slot_ = 0;
  std::uint32_t first_filter_slot_ = 0;
};

}  // namespace cobweb::conv
