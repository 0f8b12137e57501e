#include "cobweb/concept_node.hpp"

#include <algorithm>

namespace cobweb {
namespace {

void add_count(ValueCounts& counts, Symbol symbol, std::uint64_t amount) {
  auto it = std::lower_bound(counts.begin(), counts.end(), symbol,
                             [](const ValueCount& vc, Symbol s) { return vc.symbol < s; });
  if (it != counts.end() && it->symbol == symbol) {
    it->count += amount;
  } else {
    counts.insert(it, ValueCount{symbol, amount});
  }
}

}  // namespace

void ConceptNode::increment(const CompiledInstance& instance) {
  ++count;
  for (const auto& [slot, symbol] : instance.nominal) {
    if (slot >= nominal.size()) nominal.resize(slot + 1);
    add_count(nominal[slot], symbol, 1);
  }
  for (const auto& [slot, value] : instance.continuous) {
    if (slot >= continuous.size()) continuous.resize(slot + 1);
    continuous[slot].add(value);
  }
}

void ConceptNode::absorb(const ConceptNode& other) {
  count += other.count;
  if (other.nominal.size() > nominal.size()) nominal.resize(other.nominal.size());
  for (std::size_t slot = 0; slot < other.nominal.size(); ++slot) {
    for (const auto& vc : other.nominal[slot]) add_count(nominal[slot], vc.symbol, vc.count);
  }
  if (other.continuous.size() > continuous.size()) continuous.resize(other.continuous.size());
  for (std::size_t slot = 0; slot < other.continuous.size(); ++slot) {
    continuous[slot] = GaussianStat::pooled(continuous[slot], other.continuous[slot]);
  }
}

std::uint64_t ConceptNode::nominal_count(std::uint32_t slot, Symbol symbol) const {
  if (slot >= nominal.size()) return 0;
  const auto& counts = nominal[slot];
  auto it = std::lower_bound(counts.begin(), counts.end(), symbol,
                             [](const ValueCount& vc, Symbol s) { return vc.symbol < s; });
  return it != counts.end() && it->symbol == symbol ? it->count : 0;
}

std::uint64_t ConceptNode::nominal_total(std::uint32_t slot) const {
  if (slot >= nominal.size()) return 0;
  std::uint64_t total = 0;
  for (const auto& vc : nominal[slot]) total += vc.count;
  return total;
}

const GaussianStat* ConceptNode::stat(std::uint32_t slot) const {
  if (slot >= continuous.size() || continuous[slot].n == 0) return nullptr;
  return &continuous[slot];
}

bool ConceptNode::matches(const CompiledInstance& instance) const {
  if (count == 0) return false;
  std::size_t seen = 0;
  for (std::uint32_t slot = 0; slot < nominal.size(); ++slot) {
    const auto& counts = nominal[slot];
    if (counts.empty()) continue;
    if (counts.size() != 1 || counts.front().count != count) return false;
    auto it = std::lower_bound(
        instance.nominal.begin(), instance.nominal.end(), slot,
        [](const std::pair<std::uint32_t, Symbol>& p, std::uint32_t s) { return p.first < s; });
    if (it == instance.nominal.end() || it->first != slot || it->second != counts.front().symbol) {
      return false;
    }
    ++seen;
  }
  if (seen != instance.nominal.size()) return false;

  seen = 0;
  for (std::uint32_t slot = 0; slot < continuous.size(); ++slot) {
    const auto& st = continuous[slot];
    if (st.n == 0) continue;
    if (st.n != count || st.m2 != 0.0) return false;
    auto it = std::lower_bound(
        instance.continuous.begin(), instance.continuous.end(), slot,
        [](const std::pair<std::uint32_t, double>& p, std::uint32_t s) { return p.first < s; });
    if (it == instance.continuous.end() || it->first != slot || it->second != st.mean) return false;
    ++seen;
  }
  return seen == instance.continuous.size();
}

CompiledInstance ConceptNode::prototype() const {
  CompiledInstance out;
  for (std::uint32_t slot = 0; slot < nominal.size(); ++slot) {
    if (!nominal[slot].empty()) out.nominal.emplace_back(slot, nominal[slot].front().symbol);
  }
  for (std::uint32_t slot = 0; slot < continuous.size(); ++slot) {
    if (continuous[slot].n > 0) out.continuous.emplace_back(slot, continuous[slot].mean);
  }
  return out;
}

}  // namespace cobweb
