#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cobweb/attribute.hpp"
#include "cobweb/category_utility.hpp"
#include "cobweb/concept_node.hpp"

namespace cobweb {

enum class Operation : std::uint8_t { kAdd, kCreate, kMerge, kSplit };

std::string_view to_string(Operation op);

// Outcome of evaluating the four restructuring operations at one node.
// `first` is the best child (Add, Merge, Split); `second` is the runner-up
// (Merge only).
struct Choice {
  Operation op = Operation::kAdd;
  NodeId first = kNoNode;
  NodeId second = kNoNode;
  double utility = 0.0;
};

// Candidate utilities in precedence order Add, Create, Merge, Split. Returns
// the index of the maximum; on exact ties the earlier entry wins.
std::size_t pick_operation(const std::optional<double> (&utilities)[4]);

// How exact utility ties are resolved. kPrecedence takes the first
// candidate (Add > Create > Merge > Split, lowest child index). When every
// continuous spread sits below the acuity all utilities are zero, and
// precedence then chains instances down the first child.
// kSmallest keeps the operation order but sends tied Adds to the child with
// the smallest count (lowest index after that), which keeps such trees
// balanced. kHashed ranks tied candidates, operations included, by a hash
// of the deciding node and the candidate.
enum class TieBreak : std::uint8_t { kPrecedence, kHashed, kSmallest };

std::string_view to_string(TieBreak ties);

struct OperationCounters {
  std::uint64_t adds = 0;
  std::uint64_t creates = 0;
  std::uint64_t merges = 0;
  std::uint64_t splits = 0;
  std::uint64_t absorbs = 0;
  std::uint64_t fissions = 0;
};

// A Cobweb / Cobweb/3 concept hierarchy over mixed nominal and continuous
// attributes.
//
// Single writer: ifit needs exclusive access; categorize, predict and the
// accessors are const and may run concurrently with each other.
//
// Leaves are never deleted and never gain children, so a leaf id stays a
// leaf id for the lifetime of the tree. Every leaf is pure (all instances
// stored there are identical).
class CobwebTree {
 public:
  explicit CobwebTree(double acuity = 1.0, TieBreak ties = TieBreak::kPrecedence);

  // Incorporates `instance` and returns the leaf that now houses it. Throws
  // VariantMismatchError (tree untouched) if an attribute's kind disagrees
  // with earlier instances.
  NodeId ifit(const Instance& instance);
  // Same, for an instance already resolved against this tree (see
  // compile()). `remap`, when given, is applied to every utility evaluation.
  NodeId ifit_compiled(const CompiledInstance& instance, const NominalRemap* remap = nullptr);

  // Pure: sorts `instance` down the tree and returns the node where it
  // stops (a leaf, or the first node where creating a new child scores at
  // least as well as the best existing child).
  NodeId categorize(const Instance& instance) const;
  NodeId categorize_compiled(const CompiledInstance& instance,
                             const NominalRemap* remap = nullptr) const;

  // Categorizes `instance` without `target` and reads `target` off the
  // terminal concept: the modal symbol for nominal attributes, the mean for
  // continuous ones. Walks up to the nearest ancestor that observed
  // `target`; nullopt if nothing did.
  std::optional<AttributeValue> predict(const Instance& instance, std::string_view target) const;
  // Modal symbol of a nominal slot at `start` or its nearest observing
  // ancestor. Ties go to the lexicographically smallest symbol name.
  std::optional<Symbol> predict_nominal(NodeId start, std::uint32_t slot) const;

  // Best restructuring at internal node `id` if `instance` were added
  // there. Pure.
  Choice best_restructure(NodeId id, const Instance& instance,
                          const NominalRemap* remap = nullptr) const;

  // Registers attributes and symbols; throws VariantMismatchError without
  // registering anything if a kind conflicts.
  CompiledInstance compile(const Instance& instance);
  // Resolves without registering. Unknown attributes and symbols receive
  // temporary slots/symbols past the registered range.
  CompiledInstance compile_query(const Instance& instance) const;

  std::uint32_t nominal_slot(std::string_view name);
  std::uint32_t continuous_slot(std::string_view name);
  Symbol intern(std::string_view symbol) { return symbols_.intern(symbol); }

  const AttributeRegistry& attributes() const { return attributes_; }
  const SymbolTable& symbols() const { return symbols_; }

  NodeId root() const { return root_; }
  double acuity() const { return acuity_; }
  TieBreak tie_break() const { return ties_; }
  bool contains(NodeId id) const { return id < nodes_.size() && nodes_[id].has_value(); }
  // Throws StaleReferenceError for unknown ids.
  const ConceptNode& node(NodeId id) const;
  std::size_t size() const { return live_; }
  NodeId next_id() const { return static_cast<NodeId>(nodes_.size()); }
  // Depth of the deepest node; 0 for a single-node tree.
  std::size_t depth() const;
  std::size_t leaf_count() const;
  // Root first, children in order.
  std::vector<NodeId> depth_first() const;

  const OperationCounters& counters() const { return counters_; }

  // Throws InvariantError describing the first violated structural
  // invariant (links, count conservation, table bounds).
  void validate() const;

  // Rebuilds a tree from explicit parts; used by deserialisation. Nodes are
  // indexed by id, with nullopt for deleted ids.
  static CobwebTree from_parts(double acuity, AttributeRegistry attributes, SymbolTable symbols,
                               std::vector<std::optional<ConceptNode>> nodes, NodeId root,
                               TieBreak ties = TieBreak::kPrecedence);

 private:
  ConceptNode& mut(NodeId id) {
    score_cache_[id] = {kStale, 0};
    return *nodes_[id];
  }
  struct NodeScore {
    double ecg;
    std::uint64_t count;
  };
  // Cached ECG and count of an unmapped node; recomputed after any mutation.
  NodeScore node_score(NodeId id, const Scorer& scorer);
  NodeScore node_score(NodeId id, const Scorer& scorer) const;
  double node_ecg(NodeId id, const Scorer& scorer) { return node_score(id, scorer).ecg; }
  double node_ecg(NodeId id, const Scorer& scorer) const { return node_score(id, scorer).ecg; }
  NodeId make_node();
  void replace_child(NodeId parent, NodeId old_child, NodeId new_child);
  void check_kinds(const Instance& instance) const;
  void index_leaf(NodeId leaf);

  double acuity_;
  TieBreak ties_;
  AttributeRegistry attributes_;
  SymbolTable symbols_;
  std::vector<std::optional<ConceptNode>> nodes_;
  NodeId root_ = kNoNode;
  std::size_t live_ = 0;
  OperationCounters counters_;
  // Pure leaves by stored instance; routes exact duplicates to their twin
  // when utilities tie.
  std::unordered_map<CompiledInstance, NodeId, CompiledInstanceHash> leaf_index_;
  static constexpr double kStale = std::numeric_limits<double>::quiet_NaN();
  std::vector<NodeScore> score_cache_;
};

}  // namespace cobweb
