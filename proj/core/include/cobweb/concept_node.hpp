#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "cobweb/attribute.hpp"
#include "cobweb/gaussian_stat.hpp"

namespace cobweb {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

struct ValueCount {
  Symbol symbol;
  std::uint64_t count;
  friend bool operator==(const ValueCount&, const ValueCount&) = default;
};

// Per-attribute symbol counts, sorted by symbol.
using ValueCounts = std::vector<ValueCount>;

// One concept: instance count, nominal value counts and continuous
// statistics for everything stored at or below it. Tables are indexed by
// the owning tree's attribute slots; slots past the end are unobserved.
struct ConceptNode {
  NodeId id = kNoNode;
  NodeId parent = kNoNode;
  std::vector<NodeId> children;

  std::uint64_t count = 0;
  std::vector<ValueCounts> nominal;
  std::vector<GaussianStat> continuous;

  bool is_leaf() const { return children.empty(); }

  void increment(const CompiledInstance& instance);
  // Adds another node's tables into this one (count, counts and pooled
  // statistics). Links are untouched.
  void absorb(const ConceptNode& other);

  std::uint64_t nominal_count(std::uint32_t slot, Symbol symbol) const;
  std::uint64_t nominal_total(std::uint32_t slot) const;
  const GaussianStat* stat(std::uint32_t slot) const;

  // True when every instance stored here equals `instance`: same attributes
  // present, each nominal attribute holding one symbol, each continuous
  // attribute with zero spread at exactly the instance's value.
  bool matches(const CompiledInstance& instance) const;

  // The instance a pure leaf stores. Only meaningful when the node is pure
  // (every stored instance identical), which holds for every leaf.
  CompiledInstance prototype() const;
};

}  // namespace cobweb
