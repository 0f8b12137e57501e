#include "cobweb/category_utility.hpp"

#include <algorithm>
#include <cmath>

namespace cobweb {
namespace {

const ValueCounts* counts_at(const ConceptNode* node, std::size_t slot) {
  if (node == nullptr || slot >= node->nominal.size()) return nullptr;
  const auto& counts = node->nominal[slot];
  return counts.empty() ? nullptr : &counts;
}

const GaussianStat* stat_at(const ConceptNode* node, std::size_t slot) {
  if (node == nullptr || slot >= node->continuous.size()) return nullptr;
  return &node->continuous[slot];
}

std::uint64_t count_of(const ValueCounts* counts, Symbol symbol) {
  if (counts == nullptr) return 0;
  auto it = std::lower_bound(counts->begin(), counts->end(), symbol,
                             [](const ValueCount& vc, Symbol s) { return vc.symbol < s; });
  return it != counts->end() && it->symbol == symbol ? it->count : 0;
}

std::uint64_t sum_squares(const ValueCounts* counts) {
  std::uint64_t total = 0;
  if (counts == nullptr) return 0;
  for (const auto& vc : *counts) total += vc.count * vc.count;
  return total;
}

// Sum of squared counts of the elementwise sum of two sorted tables.
std::uint64_t merged_sum_squares(const ValueCounts* a, const ValueCounts* b) {
  if (a == nullptr) return sum_squares(b);
  if (b == nullptr) return sum_squares(a);
  std::uint64_t total = 0;
  auto ia = a->begin();
  auto ib = b->begin();
  while (ia != a->end() || ib != b->end()) {
    std::uint64_t c = 0;
    if (ib == b->end() || (ia != a->end() && ia->symbol < ib->symbol)) {
      c = (ia++)->count;
    } else if (ia == a->end() || ib->symbol < ia->symbol) {
      c = (ib++)->count;
    } else {
      c = ia->count + ib->count;
      ++ia;
      ++ib;
    }
    total += c * c;
  }
  return total;
}

}  // namespace

double Scorer::nominal_sum_squares(const ConceptNode* a, const ConceptNode* b,
                                   const CompiledInstance* inst) const {
  std::size_t slots = 0;
  if (a != nullptr) slots = std::max(slots, a->nominal.size());
  if (b != nullptr) slots = std::max(slots, b->nominal.size());

  std::uint64_t raw = 0;
  double remapped = 0.0;
  std::vector<std::size_t> touched;
  if (remap_ != nullptr && buckets_.size() != remap_->bucket_count()) {
    buckets_.assign(remap_->bucket_count(), 0.0);
  }

  auto cursor = inst != nullptr ? inst->nominal.begin() : std::vector<std::pair<std::uint32_t, Symbol>>::const_iterator{};
  const auto inst_end = inst != nullptr ? inst->nominal.end() : cursor;

  auto score_slot = [&](std::size_t slot, const Symbol* value) {
    const ValueCounts* ca = counts_at(a, slot);
    const ValueCounts* cb = counts_at(b, slot);
    if (ca == nullptr && cb == nullptr && value == nullptr) return;
    if (remap_ != nullptr && remap_->remaps(static_cast<std::uint32_t>(slot))) {
      auto bump = [&](Symbol s, double amount) {
        const std::size_t k = remap_->bucket(s);
        if (buckets_[k] == 0.0) touched.push_back(k);
        buckets_[k] += amount;
      };
      if (ca != nullptr) {
        for (const auto& vc : *ca) bump(vc.symbol, static_cast<double>(vc.count));
      }
      if (cb != nullptr) {
        for (const auto& vc : *cb) bump(vc.symbol, static_cast<double>(vc.count));
      }
      if (value != nullptr) bump(*value, 1.0);
      for (std::size_t k : touched) {
        remapped += buckets_[k] * buckets_[k];
        buckets_[k] = 0.0;
      }
      touched.clear();
      return;
    }
    raw += merged_sum_squares(ca, cb);
    if (value != nullptr) raw += 2 * (count_of(ca, *value) + count_of(cb, *value)) + 1;
  };

  for (std::size_t slot = 0; slot < slots; ++slot) {
    const Symbol* value = nullptr;
    if (cursor != inst_end && cursor->first == slot) {
      value = &cursor->second;
      ++cursor;
    }
    score_slot(slot, value);
  }
  // Instance attributes no node has seen.
  for (; cursor != inst_end; ++cursor) score_slot(cursor->first, &cursor->second);

  return static_cast<double>(raw) + remapped;
}

double Scorer::continuous_term(std::uint64_t n, double m2) const {
  const double floor_term = kInvTwoSqrtPi / acuity_;
  if (n <= 1) return floor_term;
  const double var = m2 / static_cast<double>(n);
  // Well inside the floor: skip the square root.
  if (var < floor_var_) return floor_term;
  return kInvTwoSqrtPi / std::max(std::sqrt(var), acuity_);
}

// Same arithmetic as continuous_sum for a node plus one instance when both
// cover exactly slots 0..m-1, without the per-slot bookkeeping.
double Scorer::dense_with(const ConceptNode& a, const CompiledInstance& inst) const {
  const double floor_term = kInvTwoSqrtPi / acuity_;
  const GaussianStat* stats = a.continuous.data();
  const auto* values = inst.continuous.data();
  const std::size_t m = inst.continuous.size();
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const GaussianStat& st = stats[i];
    if (st.n == 0) {
      total += floor_term;
      continue;
    }
    const std::uint64_t n = st.n + 1;
    const double x = values[i].second;
    const double delta = x - st.mean;
    const double mean = st.mean + delta / static_cast<double>(n);
    const double var = (st.m2 + delta * (x - mean)) / static_cast<double>(n);
    total += var < floor_var_ ? floor_term : kInvTwoSqrtPi / std::max(std::sqrt(var), acuity_);
  }
  return total;
}

double Scorer::dense_ceiling(std::size_t m) const {
  const double floor_term = kInvTwoSqrtPi / acuity_;
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) total += floor_term;
  return total;
}

double Scorer::continuous_sum(const ConceptNode* a, const ConceptNode* b,
                              const CompiledInstance* inst) const {
  std::size_t slots = 0;
  if (a != nullptr) slots = std::max(slots, a->continuous.size());
  if (b != nullptr) slots = std::max(slots, b->continuous.size());

  double total = 0.0;
  const std::pair<std::uint32_t, double>* cursor = nullptr;
  const std::pair<std::uint32_t, double>* inst_end = nullptr;
  if (inst != nullptr) {
    cursor = inst->continuous.data();
    inst_end = cursor + inst->continuous.size();
  }

  for (std::size_t slot = 0; slot < slots; ++slot) {
    const GaussianStat* sa = stat_at(a, slot);
    const GaussianStat* sb = stat_at(b, slot);
    const bool has_value = cursor != inst_end && cursor->first == slot;
    if (sb == nullptr) {
      if (!has_value) {
        if (sa != nullptr && sa->n > 0) total += continuous_term(sa->n, sa->m2);
        continue;
      }
      if (sa != nullptr && sa->n > 0) {
        // Welford step on a copy.
        const std::uint64_t n = sa->n + 1;
        const double x = cursor->second;
        const double delta = x - sa->mean;
        const double mean = sa->mean + delta / static_cast<double>(n);
        total += continuous_term(n, sa->m2 + delta * (x - mean));
      } else {
        total += continuous_term(1, 0.0);
      }
      ++cursor;
      continue;
    }
    GaussianStat st = sa != nullptr ? *sa : GaussianStat{};
    st = GaussianStat::pooled(st, *sb);
    if (has_value) {
      st.add(cursor->second);
      ++cursor;
    }
    if (st.n > 0) total += continuous_term(st.n, st.m2);
  }
  for (; cursor != inst_end; ++cursor) total += kInvTwoSqrtPi / acuity_;
  return total;
}

double Scorer::combined(const ConceptNode* a, const ConceptNode* b,
                        const CompiledInstance* inst) const {
  std::uint64_t count = inst != nullptr ? 1 : 0;
  if (a != nullptr) count += a->count;
  if (b != nullptr) count += b->count;
  if (count == 0) return 0.0;
  const double n = static_cast<double>(count);
  if (b == nullptr && a != nullptr && inst != nullptr && a->nominal.empty() &&
      inst->nominal.empty() && !inst->continuous.empty() &&
      a->continuous.size() == inst->continuous.size() &&
      inst->continuous.back().first + 1 == inst->continuous.size()) {
    return dense_with(*a, *inst);
  }
  const bool nominal = (a != nullptr && !a->nominal.empty()) || (b != nullptr && !b->nominal.empty()) ||
                       (inst != nullptr && !inst->nominal.empty());
  const double s = nominal ? nominal_sum_squares(a, b, inst) / (n * n) : 0.0;
  return s + continuous_sum(a, b, inst);
}

double expected_correct_guesses(const ConceptNode& node, double acuity, const NominalRemap* remap) {
  return Scorer(acuity, remap).ecg(node);
}

double category_utility(const ConceptNode& parent, std::span<const ConceptNode* const> partition,
                        double acuity, const NominalRemap* remap) {
  if (partition.empty() || parent.count == 0) return 0.0;
  const Scorer scorer(acuity, remap);
  const double parent_ecg = scorer.ecg(parent);
  const double parent_count = static_cast<double>(parent.count);
  double total = 0.0;
  for (const ConceptNode* child : partition) {
    total += static_cast<double>(child->count) / parent_count * (scorer.ecg(*child) - parent_ecg);
  }
  return total / static_cast<double>(partition.size());
}

}  // namespace cobweb
