#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cobweb/concept_node.hpp"

namespace cobweb {

// 1 / (2 sqrt(pi)): expected correct guesses of a unit-variance Gaussian.
inline constexpr double kInvTwoSqrtPi = 0.28209479177387814347;

// Rewrites nominal symbols of selected attributes into coarser buckets
// before any expected-correct-guesses sum is taken. Counts that land in the
// same bucket are added together.
class NominalRemap {
 public:
  virtual ~NominalRemap() = default;
  virtual bool remaps(std::uint32_t slot) const = 0;
  virtual std::size_t bucket_count() const = 0;
  // Must return a value below bucket_count().
  virtual std::size_t bucket(Symbol symbol) const = 0;
};

// Sum over nominal attributes of sum_v P(v)^2, plus over continuous
// attributes of 1 / (2 sqrt(pi) max(std, acuity)). Probabilities are
// normalised by the node count. Unobserved attributes contribute nothing.
double expected_correct_guesses(const ConceptNode& node, double acuity,
                                const NominalRemap* remap = nullptr);

// (1/n) sum_k P(C_k) [ECG(C_k) - ECG(parent)], n = partition size. Zero for
// an empty partition.
double category_utility(const ConceptNode& parent, std::span<const ConceptNode* const> partition,
                        double acuity, const NominalRemap* remap = nullptr);

// Evaluates ECG of hypothetical nodes without materialising them: a node,
// optionally combined with a second node and/or one extra instance.
// Instances are scored the same way nodes are, so remapping applies to
// them as well.
class Scorer {
 public:
  Scorer(double acuity, const NominalRemap* remap)
      : acuity_(acuity), floor_var_(acuity * acuity * (1.0 - 1e-12)), remap_(remap) {}

  double ecg(const ConceptNode& node) const { return combined(&node, nullptr, nullptr); }
  double ecg_with(const ConceptNode& node, const CompiledInstance& instance) const {
    return combined(&node, nullptr, &instance);
  }
  double ecg_singleton(const CompiledInstance& instance) const {
    return combined(nullptr, nullptr, &instance);
  }
  double ecg_merged_with(const ConceptNode& a, const ConceptNode& b,
                         const CompiledInstance& instance) const {
    return combined(&a, &b, &instance);
  }

  double acuity() const { return acuity_; }
  const NominalRemap* remap() const { return remap_; }

  // Largest ECG a node over `m` continuous attributes can have: every term
  // at the acuity floor. Summed the same way node scores are, so a fully
  // floored node scores exactly this.
  double dense_ceiling(std::size_t m) const;
  // Instance with continuous attributes only, on slots 0..m-1.
  static bool is_dense(const CompiledInstance& instance) {
    return instance.nominal.empty() && !instance.continuous.empty() &&
           instance.continuous.back().first + 1 == instance.continuous.size();
  }

 private:
  double combined(const ConceptNode* a, const ConceptNode* b, const CompiledInstance* inst) const;
  double nominal_sum_squares(const ConceptNode* a, const ConceptNode* b,
                             const CompiledInstance* inst) const;
  double continuous_term(std::uint64_t n, double m2) const;
  double dense_with(const ConceptNode& a, const CompiledInstance& inst) const;
  double continuous_sum(const ConceptNode* a, const ConceptNode* b,
                        const CompiledInstance* inst) const;

  double acuity_;
  double floor_var_;
  const NominalRemap* remap_;
  mutable std::vector<double> buckets_;
};

}  // namespace cobweb
