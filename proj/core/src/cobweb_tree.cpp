#include "cobweb/cobweb_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cobweb/error.hpp"

namespace cobweb {
namespace {

// Utilities of every operation available at one node.
struct Candidates {
  std::size_t best1 = 0;
  std::size_t best2 = 0;  // == best1 when there is a single child
  double add = 0.0;
  double create = 0.0;
  std::optional<double> merge;
  std::optional<double> split;
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Breaks exact utility ties at one node. Precedence mode keeps the first
// candidate; hashed mode ranks tied candidates by a hash of the node, its
// count and the candidate, so the choice is reproducible but not biased
// towards one position.
struct Ties {
  TieBreak mode;
  std::uint64_t salt;

  Ties(TieBreak m, NodeId node, double count)
      : mode(m), salt(splitmix64(node ^ (static_cast<std::uint64_t>(count) << 32))) {}
  bool hashed() const { return mode == TieBreak::kHashed; }
  std::uint64_t key(std::uint64_t item) const { return splitmix64(salt ^ item); }
};

}  // namespace

std::string_view to_string(Operation op) {
  switch (op) {
    case Operation::kAdd:
      return "add";
    case Operation::kCreate:
      return "create";
    case Operation::kMerge:
      return "merge";
    case Operation::kSplit:
      return "split";
  }
  return "?";
}

std::string_view to_string(TieBreak ties) {
  switch (ties) {
    case TieBreak::kHashed:
      return "hashed";
    case TieBreak::kSmallest:
      return "smallest";
    case TieBreak::kPrecedence:
      break;
  }
  return "precedence";
}

std::size_t pick_operation(const std::optional<double> (&utilities)[4]) {
  std::size_t best = 4;
  for (std::size_t i = 0; i < 4; ++i) {
    if (!utilities[i]) continue;
    if (best == 4 || *utilities[i] > *utilities[best]) best = i;
  }
  return best;
}

CobwebTree::CobwebTree(double acuity, TieBreak ties) : acuity_(acuity), ties_(ties) {
  if (!(acuity > 0.0)) throw ConfigError("acuity must be positive");
  root_ = make_node();
}

NodeId CobwebTree::make_node() {
  const auto id = static_cast<NodeId>(nodes_.size());
  nodes_.emplace_back(ConceptNode{});
  score_cache_.push_back({kStale, 0});
  nodes_.back()->id = id;
  ++live_;
  return id;
}

const ConceptNode& CobwebTree::node(NodeId id) const {
  if (!contains(id)) throw StaleReferenceError("no concept with id " + std::to_string(id));
  return *nodes_[id];
}

void CobwebTree::replace_child(NodeId parent, NodeId old_child, NodeId new_child) {
  auto& kids = mut(parent).children;
  auto it = std::find(kids.begin(), kids.end(), old_child);
  if (it == kids.end()) throw InvariantError("child link missing during restructure");
  *it = new_child;
}

std::uint32_t CobwebTree::nominal_slot(std::string_view name) {
  return attributes_.add(name, AttributeKind::kNominal).index;
}

std::uint32_t CobwebTree::continuous_slot(std::string_view name) {
  return attributes_.add(name, AttributeKind::kContinuous).index;
}

void CobwebTree::check_kinds(const Instance& instance) const {
  for (const auto& [name, value] : instance) {
    const auto kind = is_nominal(value) ? AttributeKind::kNominal : AttributeKind::kContinuous;
    if (auto slot = attributes_.find(name); slot && slot->kind != kind) {
      throw VariantMismatchError("attribute '" + name + "' is " +
                                 std::string(to_string(slot->kind)) + ", got a " +
                                 std::string(to_string(kind)) + " value");
    }
  }
}

CompiledInstance CobwebTree::compile(const Instance& instance) {
  check_kinds(instance);
  CompiledInstance out;
  for (const auto& [name, value] : instance) {
    if (const auto* symbol = std::get_if<std::string>(&value)) {
      out.nominal.emplace_back(nominal_slot(name), symbols_.intern(*symbol));
    } else {
      out.continuous.emplace_back(continuous_slot(name), std::get<double>(value));
    }
  }
  out.sort();
  return out;
}

CompiledInstance CobwebTree::compile_query(const Instance& instance) const {
  check_kinds(instance);
  CompiledInstance out;
  auto next_nominal = static_cast<std::uint32_t>(attributes_.nominal_count());
  auto next_continuous = static_cast<std::uint32_t>(attributes_.continuous_count());
  auto next_symbol = static_cast<Symbol>(symbols_.size());
  std::unordered_map<std::string, Symbol> fresh_symbols;
  for (const auto& [name, value] : instance) {
    const auto slot = attributes_.find(name);
    if (const auto* symbol = std::get_if<std::string>(&value)) {
      Symbol s;
      if (auto known = symbols_.find(*symbol)) {
        s = *known;
      } else {
        auto [it, inserted] = fresh_symbols.emplace(*symbol, next_symbol);
        if (inserted) ++next_symbol;
        s = it->second;
      }
      out.nominal.emplace_back(slot ? slot->index : next_nominal++, s);
    } else {
      out.continuous.emplace_back(slot ? slot->index : next_continuous++, std::get<double>(value));
    }
  }
  out.sort();
  return out;
}

namespace {

// The child of `ancestor` on the path to `leaf`, or kNoNode.
NodeId child_toward(const std::vector<std::optional<ConceptNode>>& nodes, NodeId ancestor,
                    NodeId leaf) {
  NodeId at = leaf;
  while (at != kNoNode && nodes[at].has_value()) {
    const NodeId up = nodes[at]->parent;
    if (up == ancestor) return at;
    at = up;
  }
  return kNoNode;
}

// Scratch space reused between calls on one thread.
struct ScoreScratch {
  std::vector<double> ecg;
  std::vector<std::uint64_t> count;
  std::vector<double> terms;
  std::vector<double> key;
  std::vector<std::size_t> floored;
};

// Tracks the path from the root to a twin leaf during a descent, so the
// child leading to it is known at every level without walking up.
class TwinPath {
 public:
  TwinPath(const std::vector<std::optional<ConceptNode>>& nodes, NodeId twin)
      : nodes_(nodes), twin_(twin) {
    if (twin_ != kNoNode) rebuild(kNoNode);
  }
  // Child of the current node on the path, or kNoNode.
  NodeId next() const { return pos_ + 1 < path_.size() ? path_[pos_ + 1] : kNoNode; }
  void descend(NodeId child) {
    if (child == next()) {
      ++pos_;
    } else {
      path_.clear();
    }
  }
  // After the tree changed around `at`, the node now being visited.
  void rebuild(NodeId at) {
    if (twin_ == kNoNode) return;
    if (at != kNoNode && path_.empty()) return;
    path_.clear();
    for (NodeId n = twin_; n != kNoNode; n = nodes_[n]->parent) path_.push_back(n);
    std::reverse(path_.begin(), path_.end());
    pos_ = 0;
    if (at == kNoNode) return;
    const auto it = std::find(path_.begin(), path_.end(), at);
    if (it == path_.end()) {
      path_.clear();
    } else {
      pos_ = static_cast<std::size_t>(it - path_.begin());
    }
  }

 private:
  const std::vector<std::optional<ConceptNode>>& nodes_;
  NodeId twin_;
  std::vector<NodeId> path_;  // root first
  std::size_t pos_ = 0;
};

template <class EcgOf>
Candidates score_candidates(const std::vector<std::optional<ConceptNode>>& nodes,
                            const ConceptNode& node, double parent_count, double parent_ecg,
                            const CompiledInstance& instance, const Scorer& scorer, bool full,
                            NodeId twin_child, const Ties& ties, EcgOf&& ecg_of) {
  const auto& kids = node.children;
  const std::size_t n = kids.size();
  thread_local ScoreScratch scratch;
  auto& ecg = scratch.ecg;
  auto& count = scratch.count;
  auto& terms = scratch.terms;
  auto& key = scratch.key;
  ecg.resize(n);
  count.resize(n);
  terms.resize(n);
  // key[k] = n_k (E'_k - E_k) + E'_k, child k's share of the add utility
  // times the parent count, up to terms common to every child. -inf until
  // evaluated.
  key.assign(n, -std::numeric_limits<double>::infinity());
  double base = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto score = ecg_of(kids[k]);
    ecg[k] = score.ecg;
    count[k] = score.count;
    terms[k] = static_cast<double>(count[k]) / parent_count * (ecg[k] - parent_ecg);
    base += terms[k];
  }
  auto evaluate = [&](std::size_t k) {
    const double grown = scorer.ecg_with(*nodes[kids[k]], instance);
    key[k] = static_cast<double>(count[k]) * (grown - ecg[k]) + grown;
  };

  // In dense continuous trees no grown child can score above the ceiling,
  // so a child already at the ceiling has key at most the ceiling. Those
  // are visited in tie order and the scan stops after two reach it.
  // Children hold subsets of the parent's instances, so a dense parent has
  // dense children.
  const bool dense = !ties.hashed() && n > 2 && Scorer::is_dense(instance) &&
                     node.nominal.empty() && node.continuous.size() == instance.continuous.size();
  auto& floored = scratch.floored;
  floored.clear();
  double ceiling = 0.0;
  if (dense) {
    const std::size_t m = instance.continuous.size();
    ceiling = scorer.dense_ceiling(m);
    for (std::size_t k = 0; k < n; ++k) {
      if (ecg[k] >= ceiling && kids[k] != twin_child) {
        floored.push_back(k);
      } else {
        evaluate(k);
      }
    }
    std::size_t found = 0;
    auto visit = [&](std::size_t k) {
      evaluate(k);
      if (key[k] == ceiling) ++found;
      return found >= 2;
    };
    if (ties.mode == TieBreak::kSmallest) {
      std::uint64_t level = 0;
      bool done = false;
      while (!done) {
        std::uint64_t next = std::numeric_limits<std::uint64_t>::max();
        for (std::size_t k : floored) {
          if (count[k] > level && count[k] < next) next = count[k];
        }
        if (next == std::numeric_limits<std::uint64_t>::max()) break;
        for (std::size_t k : floored) {
          if (count[k] == next && visit(k)) {
            done = true;
            break;
          }
        }
        level = next;
      }
    } else {
      for (std::size_t k : floored) {
        if (visit(k)) break;
      }
    }
  } else {
    for (std::size_t k = 0; k < n; ++k) evaluate(k);
  }

  Candidates out;
  const double width = static_cast<double>(n);
  // Highest key, lowest index on ties, except that a child leading to an
  // identical stored instance wins a tie.
  auto before = [&](std::size_t k, std::size_t best) {
    if (key[k] != key[best]) return key[k] > key[best];
    if (kids[best] == twin_child) return false;
    if (kids[k] == twin_child) return true;
    if (ties.mode == TieBreak::kSmallest) {
      if (count[k] != count[best]) return count[k] < count[best];
      return k < best;
    }
    return ties.hashed() && ties.key(kids[k]) > ties.key(kids[best]);
  };
  std::size_t best1 = 0;
  for (std::size_t k = 1; k < n; ++k) {
    if (before(k, best1)) best1 = k;
  }
  std::size_t best2 = best1;
  for (std::size_t k = 0; k < n; ++k) {
    if (k == best1) continue;
    if (best2 == best1 || before(k, best2)) best2 = k;
  }
  out.best1 = best1;
  out.best2 = best2;
  out.add = (base + (key[best1] - parent_ecg) / parent_count) / width;
  out.create =
      (base + (scorer.ecg_singleton(instance) - parent_ecg) / parent_count) / (width + 1.0);
  if (!full) return out;

  if (n > 2) {
    const ConceptNode& a = *nodes[kids[best1]];
    const ConceptNode& b = *nodes[kids[best2]];
    const double merged = static_cast<double>(a.count + b.count + 1) / parent_count *
                          (scorer.ecg_merged_with(a, b, instance) - parent_ecg);
    out.merge = (base - terms[best1] - terms[best2] + merged) / (width - 1.0);
  }
  const ConceptNode& promoted = *nodes[kids[best1]];
  if (!promoted.is_leaf()) {
    double total = base - terms[best1];
    for (NodeId g : promoted.children) {
      const auto score = ecg_of(g);
      total += static_cast<double>(score.count) / parent_count * (score.ecg - parent_ecg);
    }
    out.split = total / (width - 1.0 + static_cast<double>(promoted.children.size()));
  }
  return out;
}

Choice to_choice(const ConceptNode& node, const Candidates& c, const Ties& ties) {
  const std::optional<double> utilities[4] = {c.add, c.create, c.merge, c.split};
  std::size_t op = pick_operation(utilities);
  if (ties.hashed()) {
    for (std::size_t i = 0; i < 4; ++i) {
      if (i != op && utilities[i] && *utilities[i] == *utilities[op] &&
          ties.key(~std::uint64_t{i}) > ties.key(~std::uint64_t{op})) {
        op = i;
      }
    }
  }
  Choice choice;
  choice.op = static_cast<Operation>(op);
  choice.utility = *utilities[static_cast<std::size_t>(choice.op)];
  if (choice.op != Operation::kCreate) choice.first = node.children[c.best1];
  if (choice.op == Operation::kMerge) choice.second = node.children[c.best2];
  return choice;
}

}  // namespace

CobwebTree::NodeScore CobwebTree::node_score(NodeId id, const Scorer& scorer) {
  if (scorer.remap() != nullptr) return {scorer.ecg(*nodes_[id]), nodes_[id]->count};
  NodeScore& slot = score_cache_[id];
  if (std::isnan(slot.ecg)) slot = {scorer.ecg(*nodes_[id]), nodes_[id]->count};
  return slot;
}

CobwebTree::NodeScore CobwebTree::node_score(NodeId id, const Scorer& scorer) const {
  if (scorer.remap() == nullptr && !std::isnan(score_cache_[id].ecg)) return score_cache_[id];
  return {scorer.ecg(*nodes_[id]), nodes_[id]->count};
}

NodeId CobwebTree::ifit(const Instance& instance) { return ifit_compiled(compile(instance)); }

void CobwebTree::index_leaf(NodeId leaf) {
  leaf_index_.try_emplace(nodes_[leaf]->prototype(), leaf);
}

NodeId CobwebTree::ifit_compiled(const CompiledInstance& instance, const NominalRemap* remap) {
  const Scorer scorer(acuity_, remap);
  NodeId twin = kNoNode;
  if (auto it = leaf_index_.find(instance); it != leaf_index_.end()) twin = it->second;

  TwinPath path(nodes_, twin);
  NodeId current = root_;
  bool counted = false;
  while (true) {
    if (nodes_[current]->is_leaf()) {
      ConceptNode& leaf = mut(current);
      if (leaf.count == 0 || leaf.matches(instance)) {
        const bool fresh = leaf.count == 0;
        leaf.increment(instance);
        if (fresh) index_leaf(current);
        ++counters_.absorbs;
        return current;
      }
      // Fission: a new internal node takes the leaf's place and holds both
      // the old content and the new instance as children.
      const NodeId host = make_node();
      const NodeId fresh = make_node();
      const NodeId parent = nodes_[current]->parent;
      {
        ConceptNode& h = mut(host);
        const ConceptNode& old = *nodes_[current];
        h.count = old.count;
        h.nominal = old.nominal;
        h.continuous = old.continuous;
        h.increment(instance);
        h.parent = parent;
        h.children = {current, fresh};
      }
      if (parent == kNoNode) {
        root_ = host;
      } else {
        replace_child(parent, current, host);
      }
      mut(current).parent = host;
      mut(fresh).parent = host;
      mut(fresh).increment(instance);
      index_leaf(fresh);
      ++counters_.fissions;
      return fresh;
    }

    if (!counted) mut(current).increment(instance);
    counted = false;
    const ConceptNode& here = *nodes_[current];
    const Ties ties(ties_, current, static_cast<double>(here.count));
    const auto candidates =
        score_candidates(nodes_, here, static_cast<double>(here.count), node_ecg(current, scorer),
                         instance, scorer, true, path.next(), ties,
                         [&](NodeId id) { return node_score(id, scorer); });
    const Choice choice = to_choice(here, candidates, ties);

    switch (choice.op) {
      case Operation::kAdd:
        ++counters_.adds;
        path.descend(choice.first);
        current = choice.first;
        break;
      case Operation::kCreate: {
        const NodeId leaf = make_node();
        mut(leaf).parent = current;
        mut(leaf).increment(instance);
        mut(current).children.push_back(leaf);
        index_leaf(leaf);
        ++counters_.creates;
        return leaf;
      }
      case Operation::kMerge: {
        const NodeId merged = make_node();
        auto& kids = mut(current).children;
        const auto pos1 = std::find(kids.begin(), kids.end(), choice.first) - kids.begin();
        const auto pos2 = std::find(kids.begin(), kids.end(), choice.second) - kids.begin();
        const NodeId lo = kids[std::min(pos1, pos2)];
        const NodeId hi = kids[std::max(pos1, pos2)];
        kids[std::min(pos1, pos2)] = merged;
        kids.erase(kids.begin() + std::max(pos1, pos2));
        ConceptNode& m = mut(merged);
        m.absorb(*nodes_[lo]);
        m.absorb(*nodes_[hi]);
        m.parent = current;
        m.children = {lo, hi};
        mut(lo).parent = merged;
        mut(hi).parent = merged;
        ++counters_.merges;
        current = merged;
        path.rebuild(current);
        break;
      }
      case Operation::kSplit: {
        const std::vector<NodeId> promoted = nodes_[choice.first]->children;
        auto& kids = mut(current).children;
        auto pos = std::find(kids.begin(), kids.end(), choice.first);
        pos = kids.erase(pos);
        kids.insert(pos, promoted.begin(), promoted.end());
        for (NodeId g : promoted) mut(g).parent = current;
        nodes_[choice.first].reset();
        --live_;
        ++counters_.splits;
        counted = true;
        path.rebuild(current);
        break;
      }
    }
  }
}

NodeId CobwebTree::categorize(const Instance& instance) const {
  return categorize_compiled(compile_query(instance));
}

NodeId CobwebTree::categorize_compiled(const CompiledInstance& instance,
                                       const NominalRemap* remap) const {
  const Scorer scorer(acuity_, remap);
  NodeId twin = kNoNode;
  if (auto it = leaf_index_.find(instance); it != leaf_index_.end()) twin = it->second;

  TwinPath path(nodes_, twin);
  NodeId current = root_;
  while (true) {
    const ConceptNode& here = *nodes_[current];
    if (here.is_leaf()) return current;
    const Ties ties(ties_, current, static_cast<double>(here.count + 1));
    const auto c = score_candidates(nodes_, here, static_cast<double>(here.count + 1),
                                    scorer.ecg_with(here, instance), instance, scorer, false,
                                    path.next(), ties,
                                    [&](NodeId id) { return node_score(id, scorer); });
    if (c.create >= c.add) return current;
    path.descend(here.children[c.best1]);
    current = here.children[c.best1];
  }
}

Choice CobwebTree::best_restructure(NodeId id, const Instance& instance,
                                    const NominalRemap* remap) const {
  const ConceptNode& here = node(id);
  if (here.is_leaf()) throw Error("best_restructure needs an internal node");
  const auto compiled = compile_query(instance);
  const Scorer scorer(acuity_, remap);
  NodeId twin = kNoNode;
  if (auto it = leaf_index_.find(compiled); it != leaf_index_.end()) twin = it->second;
  const Ties ties(ties_, id, static_cast<double>(here.count + 1));
  const auto c = score_candidates(nodes_, here, static_cast<double>(here.count + 1),
                                  scorer.ecg_with(here, compiled), compiled, scorer, true,
                                  child_toward(nodes_, id, twin), ties,
                                  [&](NodeId n) { return node_score(n, scorer); });
  return to_choice(here, c, ties);
}

std::optional<Symbol> CobwebTree::predict_nominal(NodeId start, std::uint32_t slot) const {
  for (NodeId at = start; at != kNoNode; at = node(at).parent) {
    const ConceptNode& here = node(at);
    if (slot >= here.nominal.size() || here.nominal[slot].empty()) continue;
    const ValueCount* best = nullptr;
    for (const auto& vc : here.nominal[slot]) {
      if (best == nullptr || vc.count > best->count ||
          (vc.count == best->count && symbols_.name(vc.symbol) < symbols_.name(best->symbol))) {
        best = &vc;
      }
    }
    return best->symbol;
  }
  return std::nullopt;
}

std::optional<AttributeValue> CobwebTree::predict(const Instance& instance,
                                                  std::string_view target) const {
  Instance query = instance;
  query.erase(target);
  const NodeId terminal = categorize_compiled(compile_query(query));
  const auto slot = attributes_.find(target);
  if (!slot) return std::nullopt;
  if (slot->kind == AttributeKind::kNominal) {
    if (auto symbol = predict_nominal(terminal, slot->index)) return symbols_.name(*symbol);
    return std::nullopt;
  }
  for (NodeId at = terminal; at != kNoNode; at = node(at).parent) {
    if (const GaussianStat* st = node(at).stat(slot->index)) return st->mean;
  }
  return std::nullopt;
}

std::vector<NodeId> CobwebTree::depth_first() const {
  std::vector<NodeId> order;
  order.reserve(live_);
  std::vector<NodeId> stack{root_};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    order.push_back(id);
    const auto& kids = nodes_[id]->children;
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
  return order;
}

std::size_t CobwebTree::depth() const {
  std::size_t deepest = 0;
  std::vector<std::pair<NodeId, std::size_t>> stack{{root_, 0}};
  while (!stack.empty()) {
    const auto [id, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    for (NodeId c : nodes_[id]->children) stack.emplace_back(c, d + 1);
  }
  return deepest;
}

std::size_t CobwebTree::leaf_count() const {
  std::size_t leaves = 0;
  for (const auto& n : nodes_) {
    if (n && n->is_leaf()) ++leaves;
  }
  return leaves;
}

void CobwebTree::validate() const {
  auto fail = [](const std::string& what) { throw InvariantError(what); };
  if (!contains(root_)) fail("root is missing");
  if (nodes_[root_]->parent != kNoNode) fail("root has a parent");
  std::vector<bool> seen(nodes_.size(), false);
  std::vector<NodeId> stack{root_};
  std::size_t visited = 0;
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    if (seen[id]) fail("node " + std::to_string(id) + " reached twice");
    seen[id] = true;
    ++visited;
    const ConceptNode& n = *nodes_[id];
    if (n.id != id) fail("node " + std::to_string(id) + " carries id " + std::to_string(n.id));
    for (std::uint32_t slot = 0; slot < n.nominal.size(); ++slot) {
      if (n.nominal_total(slot) > n.count) fail("nominal counts exceed count at " + std::to_string(id));
    }
    for (const auto& st : n.continuous) {
      if (st.n > n.count) fail("continuous count exceeds count at " + std::to_string(id));
      if (st.m2 < 0.0) fail("negative m2 at " + std::to_string(id));
    }
    if (n.is_leaf()) continue;
    std::uint64_t sum = 0;
    for (NodeId c : n.children) {
      if (!contains(c)) fail("dangling child " + std::to_string(c));
      if (nodes_[c]->parent != id) fail("child " + std::to_string(c) + " has wrong parent");
      sum += nodes_[c]->count;
      stack.push_back(c);
    }
    if (sum != n.count) fail("count of " + std::to_string(id) + " is not the sum of its children");
  }
  if (visited != live_) fail("orphaned nodes present");
}

CobwebTree CobwebTree::from_parts(double acuity, AttributeRegistry attributes,
                                  SymbolTable symbols,
                                  std::vector<std::optional<ConceptNode>> nodes, NodeId root,
                                  TieBreak ties) {
  CobwebTree tree(acuity, ties);
  tree.attributes_ = std::move(attributes);
  tree.symbols_ = std::move(symbols);
  tree.nodes_ = std::move(nodes);
  tree.score_cache_.assign(tree.nodes_.size(), {kStale, 0});
  tree.root_ = root;
  tree.live_ = static_cast<std::size_t>(
      std::count_if(tree.nodes_.begin(), tree.nodes_.end(), [](const auto& n) { return n.has_value(); }));
  tree.validate();
  for (NodeId id : tree.depth_first()) {
    if (tree.nodes_[id]->is_leaf() && tree.nodes_[id]->count > 0) tree.index_leaf(id);
  }
  return tree;
}

}  // namespace cobweb
