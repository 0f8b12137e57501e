#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cobweb/category_utility.hpp"
#include "cobweb/cobweb_tree.hpp"
#include "cobweb/error.hpp"
#include "cobweb/tree_io.hpp"
#include "support/oracles.hpp"

namespace cobweb {
namespace {

// Builds a node holding `instances`, resolved against `tree`'s registry.
ConceptNode node_of(CobwebTree& tree, const std::vector<Instance>& instances) {
  ConceptNode node;
  for (const auto& inst : instances) node.increment(tree.compile(inst));
  return node;
}

Instance to_instance(const oracle::NominalInstance& in) {
  Instance out;
  for (const auto& [k, v] : in) out.set(k, v);
  return out;
}

TEST(ExpectedCorrectGuesses, SingleValueIsOne) {
  CobwebTree tree;
  const auto node = node_of(tree, {{{"color", "red"}}, {{"color", "red"}}, {{"color", "red"}},
                                   {{"color", "red"}}});
  EXPECT_DOUBLE_EQ(expected_correct_guesses(node, 1.0), 1.0);
}

TEST(ExpectedCorrectGuesses, SymmetricSplitIsHalf) {
  CobwebTree tree;
  const auto node = node_of(tree, {{{"color", "red"}}, {{"color", "red"}}, {{"color", "blue"}},
                                   {{"color", "blue"}}});
  EXPECT_DOUBLE_EQ(expected_correct_guesses(node, 1.0), 0.5);
}

TEST(ExpectedCorrectGuesses, ZeroSpreadContinuousIsFlooredAtAcuity) {
  CobwebTree tree;
  const auto node = node_of(tree, {{{"x", 3.0}}, {{"x", 3.0}}, {{"x", 3.0}}});
  // 1 / (2 sqrt(pi)) to 20 digits.
  EXPECT_NEAR(expected_correct_guesses(node, 1.0), 0.28209479177387814347, 1e-15);
  EXPECT_NEAR(kInvTwoSqrtPi, 1.0 / (2.0 * std::sqrt(M_PI)), 1e-16);
}

TEST(ExpectedCorrectGuesses, EmptyNodeIsZero) {
  EXPECT_EQ(expected_correct_guesses(ConceptNode{}, 1.0), 0.0);
}

TEST(ExpectedCorrectGuesses, WideContinuousUsesStd) {
  CobwebTree tree;
  const auto node = node_of(tree, {{{"x", 0.0}}, {{"x", 10.0}}});
  EXPECT_NEAR(expected_correct_guesses(node, 1.0), kInvTwoSqrtPi / 5.0, 1e-15);
}

TEST(CategoryUtility, IdenticalChildIsZero) {
  CobwebTree tree;
  const std::vector<Instance> data{{{"color", "red"}}, {{"color", "blue"}}};
  const auto parent = node_of(tree, data);
  const auto child = node_of(tree, data);
  const ConceptNode* partition[] = {&child};
  EXPECT_DOUBLE_EQ(category_utility(parent, partition, 1.0), 0.0);
}

TEST(CategoryUtility, PureSplitMatchesOracle) {
  const std::vector<oracle::NominalInstance> reds{{{"color", "red"}}, {{"color", "red"}}};
  const std::vector<oracle::NominalInstance> blues{{{"color", "blue"}}, {{"color", "blue"}}};
  std::vector<oracle::NominalInstance> all = reds;
  all.insert(all.end(), blues.begin(), blues.end());
  const double expected =
      oracle::category_utility(oracle::tabulate(all), {oracle::tabulate(reds), oracle::tabulate(blues)});
  ASSERT_DOUBLE_EQ(expected, 0.25);

  CobwebTree tree;
  auto convert = [](const auto& v) {
    std::vector<Instance> out;
    for (const auto& i : v) out.push_back(to_instance(i));
    return out;
  };
  const auto parent = node_of(tree, convert(all));
  const auto c1 = node_of(tree, convert(reds));
  const auto c2 = node_of(tree, convert(blues));
  const ConceptNode* partition[] = {&c1, &c2};
  EXPECT_DOUBLE_EQ(category_utility(parent, partition, 1.0), 0.25);
}

TEST(CategoryUtility, EmptyPartitionIsZero) {
  CobwebTree tree;
  const auto parent = node_of(tree, {{{"a", "x"}}});
  EXPECT_EQ(category_utility(parent, {}, 1.0), 0.0);
}

TEST(CategoryUtility, ScaleInvariantUnderUniformDuplication) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    CobwebTree tree;
    std::vector<std::vector<Instance>> groups(3);
    for (auto& g : groups) {
      const int size = 1 + static_cast<int>(rng() % 4);
      for (int i = 0; i < size; ++i) {
        Instance inst{{"color", rng() % 2 ? "red" : "blue"}, {"x", unit(rng)}};
        if (rng() % 3) inst.set("shape", rng() % 2 ? "sq" : "tri");
        g.push_back(inst);
      }
    }
    auto build = [&](int copies) {
      std::vector<ConceptNode> children;
      ConceptNode parent;
      for (const auto& g : groups) {
        ConceptNode child;
        for (const auto& inst : g) {
          const auto c = tree.compile(inst);
          for (int k = 0; k < copies; ++k) {
            child.increment(c);
            parent.increment(c);
          }
        }
        children.push_back(child);
      }
      std::vector<const ConceptNode*> ptrs;
      for (const auto& c : children) ptrs.push_back(&c);
      return category_utility(parent, ptrs, 0.5);
    };
    EXPECT_NEAR(build(1), build(10), 1e-12);
  }
}

TEST(GaussianStat, TwoPointUpdate) {
  GaussianStat st{1, 2.0, 0.0};
  st.add(4.0);
  EXPECT_EQ(st.n, 2u);
  EXPECT_DOUBLE_EQ(st.mean, 3.0);
  EXPECT_DOUBLE_EQ(st.m2, 2.0);
}

TEST(GaussianStat, SingleObservationHasZeroStd) {
  GaussianStat st;
  st.add(5.0);
  EXPECT_EQ(st.stddev(), 0.0);
}

TEST(GaussianStat, StreamMatchesTwoPassBatch) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> dist(3.0, 7.0);
  std::vector<double> values;
  GaussianStat st;
  for (int i = 0; i < 1000; ++i) {
    values.push_back(dist(rng));
    st.add(values.back());
    const auto batch = oracle::two_pass(values);
    ASSERT_NEAR(st.mean, batch.mean, 1e-9 * std::max(1.0, std::abs(batch.mean)));
    ASSERT_NEAR(st.stddev(), batch.std, 1e-9 * std::max(1.0, batch.std));
  }
}

TEST(GaussianStat, PooledEqualsSequential) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(-10.0, 10.0);
  GaussianStat a, b, all;
  for (int i = 0; i < 100; ++i) {
    const double x = dist(rng);
    (i % 3 ? a : b).add(x);
    all.add(x);
  }
  const auto pooled = GaussianStat::pooled(a, b);
  EXPECT_EQ(pooled.n, all.n);
  EXPECT_NEAR(pooled.mean, all.mean, 1e-12);
  EXPECT_NEAR(pooled.m2, all.m2, 1e-9);
}

TEST(IncrementCounts, NominalCountGrows) {
  CobwebTree tree;
  ConceptNode node = node_of(tree, {{{"label", "A"}}});
  node.increment(tree.compile({{"label", "A"}}));
  EXPECT_EQ(node.nominal_count(0, *tree.symbols().find("A")), 2u);
  EXPECT_EQ(node.count, 2u);
}

TEST(Ifit, FirstInstanceMakesRootLeaf) {
  CobwebTree tree;
  const NodeId id = tree.ifit({{"color", "red"}, {"size", 2.0}});
  EXPECT_EQ(id, tree.root());
  EXPECT_EQ(tree.node(id).count, 1u);
  EXPECT_TRUE(tree.node(id).is_leaf());
}

TEST(Ifit, IdenticalInstancesAbsorb) {
  CobwebTree tree;
  tree.ifit({{"color", "red"}, {"size", 2.0}});
  tree.ifit({{"color", "red"}, {"size", 2.0}});
  EXPECT_EQ(tree.node(tree.root()).count, 2u);
  EXPECT_TRUE(tree.node(tree.root()).is_leaf());
  EXPECT_EQ(tree.size(), 1u);
}

TEST(Ifit, DistinctInstancesFission) {
  CobwebTree tree;
  const NodeId first = tree.ifit({{"color", "red"}});
  const NodeId second = tree.ifit({{"color", "blue"}});
  const ConceptNode& root = tree.node(tree.root());
  EXPECT_EQ(root.count, 2u);
  ASSERT_EQ(root.children.size(), 2u);
  EXPECT_EQ(root.children[0], first);  // the old leaf keeps its id
  EXPECT_EQ(root.children[1], second);
  for (NodeId c : root.children) EXPECT_EQ(tree.node(c).count, 1u);
}

TEST(Ifit, VariantMismatchLeavesTreeUntouched) {
  CobwebTree tree;
  tree.ifit({{"color", "red"}, {"x", 1.0}});
  const auto before = tree_to_json(tree);
  EXPECT_THROW(tree.ifit({{"color", 1.0}, {"y", 2.0}}), VariantMismatchError);
  EXPECT_THROW(tree.ifit({{"x", "big"}}), VariantMismatchError);
  EXPECT_EQ(tree_to_json(tree), before);
}

TEST(BestRestructure, DuplicateOfSingletonChildIsAdd) {
  CobwebTree tree;
  const NodeId red = tree.ifit({{"color", "red"}, {"shape", "square"}});
  tree.ifit({{"color", "blue"}, {"shape", "circle"}});
  const Choice c = tree.best_restructure(tree.root(), {{"color", "red"}, {"shape", "square"}});
  EXPECT_EQ(c.op, Operation::kAdd);
  EXPECT_EQ(c.first, red);
  // Hand trace: parent ECG 10/9, add = (1/2)(8/9).
  EXPECT_NEAR(c.utility, 4.0 / 9.0, 1e-12);
}

TEST(BestRestructure, NovelValuesCreate) {
  CobwebTree tree;
  tree.ifit({{"color", "red"}, {"shape", "square"}});
  tree.ifit({{"color", "blue"}, {"shape", "circle"}});
  const Choice c = tree.best_restructure(tree.root(), {{"color", "green"}, {"shape", "triangle"}});
  EXPECT_EQ(c.op, Operation::kCreate);
  // Hand trace: parent ECG 2/3, create = (1/3)(4/3); best add is 1/3.
  EXPECT_NEAR(c.utility, 4.0 / 9.0, 1e-12);
}

TEST(BestRestructure, LeafIsRejected) {
  CobwebTree tree;
  tree.ifit({{"a", "x"}});
  EXPECT_THROW(tree.best_restructure(tree.root(), {{"a", "y"}}), Error);
}

TEST(PickOperation, TiesFollowPrecedence) {
  const std::optional<double> all_equal[4] = {0.5, 0.5, 0.5, 0.5};
  EXPECT_EQ(pick_operation(all_equal), 0u);
  const std::optional<double> create_merge[4] = {0.1, 0.7, 0.7, std::nullopt};
  EXPECT_EQ(pick_operation(create_merge), 1u);
  const std::optional<double> split_best[4] = {0.1, 0.2, std::nullopt, 0.3};
  EXPECT_EQ(pick_operation(split_best), 3u);
}

// Narrow-spread continuous data keeps most nodes at the acuity floor, which
// makes wide nodes full of exact ties.
Instance narrow_instance(std::mt19937_64& rng, double spread) {
  Instance inst;
  for (const char* a : {"p", "q", "r"}) inst.set(a, static_cast<double>(rng() % 1000) / 1000.0 * spread);
  return inst;
}

TEST(BestRestructure, AddChildMatchesExhaustiveUtility) {
  std::size_t checked = 0;
  for (double spread : {0.8, 2.5, 6.0}) {
    for (TieBreak ties : {TieBreak::kSmallest, TieBreak::kPrecedence}) {
      std::mt19937_64 rng(static_cast<std::uint64_t>(spread * 10) + static_cast<int>(ties));
      CobwebTree tree(1.0, ties);
      for (int i = 0; i < 300; ++i) tree.ifit(narrow_instance(rng, spread));
      for (int q = 0; q < 30; ++q) {
        const Instance query = narrow_instance(rng, spread);
        for (NodeId id : tree.depth_first()) {
          const ConceptNode& here = tree.node(id);
          if (here.children.size() < 3) continue;
          const Choice c = tree.best_restructure(id, query);
          if (c.op != Operation::kAdd) continue;

          const auto compiled = tree.compile_query(query);
          ConceptNode parent = here;
          parent.increment(compiled);
          std::vector<double> cu;
          for (std::size_t k = 0; k < here.children.size(); ++k) {
            std::vector<ConceptNode> kids;
            for (NodeId child : here.children) kids.push_back(tree.node(child));
            kids[k].increment(compiled);
            std::vector<const ConceptNode*> part;
            for (const auto& kid : kids) part.push_back(&kid);
            cu.push_back(category_utility(parent, part, 1.0));
          }
          const double top = *std::max_element(cu.begin(), cu.end());
          std::size_t want = here.children.size();
          for (std::size_t k = 0; k < cu.size(); ++k) {
            if (cu[k] < top - 1e-12) continue;
            if (want == here.children.size() ||
                (ties == TieBreak::kSmallest &&
                 tree.node(here.children[k]).count < tree.node(here.children[want]).count)) {
              want = k;
            }
          }
          ASSERT_EQ(c.first, here.children[want]) << "node " << id << " spread " << spread;
          ASSERT_NEAR(c.utility, top, 1e-12);
          ++checked;
        }
      }
    }
  }
  EXPECT_GT(checked, 100u);
}

TEST(Categorize, SingleNodeTreeReturnsRoot) {
  CobwebTree tree;
  tree.ifit({{"a", "x"}});
  EXPECT_EQ(tree.categorize(Instance{{"a", "y"}}), tree.root());
}

TEST(Categorize, TrainingInstanceReturnsItsLeaf) {
  CobwebTree tree;
  const Instance a{{"color", "red"}, {"shape", "square"}};
  const Instance b{{"color", "blue"}, {"shape", "circle"}};
  const Instance c{{"color", "green"}, {"shape", "triangle"}};
  tree.ifit(a);
  tree.ifit(b);
  tree.ifit(c);
  for (const auto& inst : {a, b, c}) {
    const NodeId id = tree.categorize(inst);
    EXPECT_TRUE(tree.node(id).is_leaf());
    EXPECT_TRUE(tree.node(id).matches(tree.compile_query(inst)));
  }
}

TEST(Categorize, IsPure) {
  CobwebTree tree;
  std::mt19937_64 rng(11);
  for (int i = 0; i < 40; ++i) {
    tree.ifit({{"a", std::to_string(rng() % 3)}, {"b", std::to_string(rng() % 4)},
               {"x", static_cast<double>(rng() % 7)}});
  }
  const auto before = tree_to_json(tree);
  tree.categorize(Instance{{"a", "1"}, {"x", 2.5}});
  tree.categorize(Instance{{"a", "never-seen"}, {"unknown", 1.0}});
  tree.predict({{"b", "2"}}, "a");
  EXPECT_EQ(tree_to_json(tree), before);
}

TEST(Predict, RecallsLabelFromMatchingColor) {
  CobwebTree tree;
  tree.ifit({{"x", "red"}, {"label", "A"}});
  tree.ifit({{"x", "blue"}, {"label", "B"}});
  const auto p = tree.predict({{"x", "red"}}, "label");
  ASSERT_TRUE(p.has_value());
  EXPECT_EQ(std::get<std::string>(*p), "A");
}

TEST(Predict, NeverSeenTargetIsNone) {
  CobwebTree tree;
  tree.ifit({{"x", "red"}});
  tree.ifit({{"x", "blue"}});
  EXPECT_FALSE(tree.predict({{"x", "red"}}, "label").has_value());
}

TEST(Predict, SingleInstanceTree) {
  CobwebTree tree;
  tree.ifit({{"x", "red"}, {"label", "A"}});
  const auto p = tree.predict({{"x", "red"}}, "label");
  ASSERT_TRUE(p.has_value());
  EXPECT_EQ(std::get<std::string>(*p), "A");
}

TEST(Predict, ContinuousTargetReturnsMean) {
  CobwebTree tree;
  tree.ifit({{"x", "red"}, {"y", 2.0}});
  tree.ifit({{"x", "red"}, {"y", 2.0}});
  const auto p = tree.predict({{"x", "red"}}, "y");
  ASSERT_TRUE(p.has_value());
  EXPECT_DOUBLE_EQ(std::get<double>(*p), 2.0);
}

TEST(Predict, IgnoresTargetWhenSorting) {
  CobwebTree tree;
  tree.ifit({{"x", "red"}, {"label", "A"}});
  tree.ifit({{"x", "blue"}, {"label", "B"}});
  const auto p = tree.predict({{"x", "red"}, {"label", "B"}}, "label");
  ASSERT_TRUE(p.has_value());
  EXPECT_EQ(std::get<std::string>(*p), "A");
}

Instance random_instance(std::mt19937_64& rng) {
  Instance inst;
  if (rng() % 5) inst.set("color", std::to_string(rng() % 3));
  if (rng() % 4) inst.set("shape", std::to_string(rng() % 2));
  inst.set("size", static_cast<double>(rng() % 50) / 7.0);
  if (rng() % 2) inst.set("weight", static_cast<double>(rng() % 9));
  return inst;
}

TEST(TreeProperties, CountConservationOnRandomStreams) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    CobwebTree tree(0.5);
    for (int i = 1; i <= 120; ++i) {
      const NodeId leaf = tree.ifit(random_instance(rng));
      ASSERT_TRUE(tree.node(leaf).is_leaf());
      ASSERT_NO_THROW(tree.validate());
      ASSERT_EQ(tree.node(tree.root()).count, static_cast<std::uint64_t>(i));
    }
  }
}

TEST(TreeProperties, LeavesStayLeaves) {
  std::mt19937_64 rng(99);
  CobwebTree tree(0.5);
  std::vector<NodeId> leaves;
  for (int i = 0; i < 300; ++i) {
    leaves.push_back(tree.ifit(random_instance(rng)));
    for (NodeId id : leaves) {
      ASSERT_TRUE(tree.contains(id));
      ASSERT_TRUE(tree.node(id).is_leaf());
    }
  }
  EXPECT_GT(tree.counters().merges + tree.counters().splits, 0u);
}

TEST(TreeProperties, DeterministicSerialization) {
  auto build = [] {
    std::mt19937_64 rng(5);
    CobwebTree tree(0.5);
    for (int i = 0; i < 150; ++i) tree.ifit(random_instance(rng));
    return tree_to_json(tree);
  };
  EXPECT_EQ(build(), build());
}

TEST(TreeProperties, DuplicateAbsorption) {
  const Instance inst{{"color", "red"}, {"x", 1.5}};
  CobwebTree once;
  once.ifit(inst);
  CobwebTree many;
  for (int i = 0; i < 7; ++i) many.ifit(inst);
  EXPECT_EQ(many.node(many.root()).count, 7u);
  EXPECT_EQ(many.size(), once.size());
  EXPECT_EQ(many.depth_first(), once.depth_first());
}

TEST(TreeProperties, CuMatchesOracleOnSmallPartitions) {
  // Every partition of up to four children, each holding one or two
  // instances over three binary attributes.
  std::vector<std::vector<oracle::NominalInstance>> groups;
  std::vector<oracle::NominalInstance> singles;
  for (int bits = 0; bits < 8; ++bits) {
    singles.push_back({{"a", bits & 1 ? "1" : "0"}, {"b", bits & 2 ? "1" : "0"},
                       {"c", bits & 4 ? "1" : "0"}});
  }
  for (std::size_t i = 0; i < 8; ++i) {
    groups.push_back({singles[i]});
    for (std::size_t j = i; j < 8; ++j) groups.push_back({singles[i], singles[j]});
  }
  CobwebTree tree;
  std::vector<ConceptNode> nodes;
  for (const auto& g : groups) {
    std::vector<Instance> insts;
    for (const auto& i : g) insts.push_back(to_instance(i));
    nodes.push_back(node_of(tree, insts));
  }
  std::size_t checked = 0;
  double worst = 0.0;
  std::vector<std::size_t> pick;
  std::function<void(std::size_t)> recurse = [&](std::size_t start) {
    if (!pick.empty()) {
      ConceptNode parent;
      std::vector<const ConceptNode*> partition;
      std::vector<oracle::CountTable> tables;
      std::vector<oracle::NominalInstance> all;
      for (std::size_t k : pick) {
        parent.absorb(nodes[k]);
        partition.push_back(&nodes[k]);
        tables.push_back(oracle::tabulate(groups[k]));
        all.insert(all.end(), groups[k].begin(), groups[k].end());
      }
      const double got = category_utility(parent, partition, 1.0);
      const double want = oracle::category_utility(oracle::tabulate(all), tables);
      worst = std::max(worst, std::abs(got - want));
      ++checked;
    }
    if (pick.size() == 4) return;
    for (std::size_t k = start; k < groups.size(); k += 3) {  // stride keeps runtime small
      pick.push_back(k);
      recurse(k);
      pick.pop_back();
    }
  };
  recurse(0);
  EXPECT_GT(checked, 1000u);
  EXPECT_LE(worst, 1e-12);
}

TEST(TreeIo, RoundTripPreservesBehaviour) {
  std::mt19937_64 rng(21);
  CobwebTree tree(0.75);
  for (int i = 0; i < 80; ++i) tree.ifit(random_instance(rng));
  CobwebTree loaded = tree_from_json(tree_to_json(tree));
  EXPECT_EQ(tree_to_json(loaded), tree_to_json(tree));
  for (int i = 0; i < 40; ++i) {
    const auto inst = random_instance(rng);
    EXPECT_EQ(tree.categorize(inst), loaded.categorize(inst));
    EXPECT_EQ(tree.ifit(inst), loaded.ifit(inst));
  }
  EXPECT_EQ(tree_to_json(loaded), tree_to_json(tree));
}

TEST(TreeIo, MissingM2IsRebuiltFromStd) {
  CobwebTree tree;
  tree.ifit({{"x", 1.0}});
  tree.ifit({{"x", 3.0}});
  std::string doc = tree_to_json(tree);
  // Strip every "m2" field.
  for (auto pos = doc.find("\"m2\":"); pos != std::string::npos; pos = doc.find("\"m2\":")) {
    const auto end = doc.find(',', pos);
    doc.erase(pos, end - pos + 1);
  }
  const CobwebTree loaded = tree_from_json(doc);
  EXPECT_DOUBLE_EQ(loaded.node(loaded.root()).continuous[0].m2, 2.0);
}

TEST(TreeIo, RejectsGarbage) {
  EXPECT_THROW(tree_from_json("not json"), DataError);
  EXPECT_THROW(tree_from_json("{\"format\":\"cobweb-tree\",\"formatVersion\":99}"), DataError);
  EXPECT_THROW(tree_from_json("{\"format\":\"something-else\"}"), DataError);
}

TEST(TreeIo, DotHasOneNodePerConceptAndTreeEdges) {
  std::mt19937_64 rng(8);
  CobwebTree tree;
  tree.ifit(random_instance(rng));
  auto count = [](const std::string& dot, const std::string& needle) {
    std::size_t n = 0;
    for (auto p = dot.find(needle); p != std::string::npos; p = dot.find(needle, p + 1)) ++n;
    return n;
  };
  std::string dot = to_dot(tree, "t");
  EXPECT_EQ(count(dot, "[label="), 1u);
  EXPECT_EQ(count(dot, "->"), 0u);
  for (int i = 0; i < 30; ++i) tree.ifit(random_instance(rng));
  dot = to_dot(tree, "t");
  EXPECT_EQ(count(dot, "[label="), tree.size());
  EXPECT_EQ(count(dot, "->"), tree.size() - 1);
}

}  // namespace
}  // namespace cobweb
