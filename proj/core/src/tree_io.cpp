#include "cobweb/tree_io.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cobweb/error.hpp"
#include "json_io.hpp"

namespace cobweb {
namespace detail {

using nlohmann::json;

json parse_document(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed JSON: ") + e.what());
  }
}

json tree_document(const CobwebTree& tree) {
  const auto& attrs = tree.attributes();
  const auto& symbols = tree.symbols();
  json doc;
  doc["format"] = "cobweb-tree";
  doc["formatVersion"] = kTreeFormatVersion;
  doc["acuity"] = tree.acuity();
  doc["tieBreak"] = to_string(tree.tie_break());
  doc["root"] = tree.root();
  doc["nextId"] = tree.next_id();
  doc["nominalAttributes"] = attrs.nominal_names();
  doc["continuousAttributes"] = attrs.continuous_names();
  json symbol_names = json::array();
  for (Symbol s = 0; s < symbols.size(); ++s) symbol_names.push_back(symbols.name(s));
  doc["symbols"] = std::move(symbol_names);

  json nodes = json::array();
  for (NodeId id : tree.depth_first()) {
    const ConceptNode& n = tree.node(id);
    json entry;
    entry["id"] = id;
    entry["parent"] = n.parent == kNoNode ? json(nullptr) : json(n.parent);
    entry["children"] = n.children;
    entry["count"] = n.count;
    json nominal = json::object();
    for (std::uint32_t slot = 0; slot < n.nominal.size(); ++slot) {
      if (n.nominal[slot].empty()) continue;
      json counts = json::object();
      for (const auto& vc : n.nominal[slot]) counts[symbols.name(vc.symbol)] = vc.count;
      nominal[attrs.nominal_names()[slot]] = std::move(counts);
    }
    entry["nominal"] = std::move(nominal);
    json continuous = json::object();
    for (std::uint32_t slot = 0; slot < n.continuous.size(); ++slot) {
      const GaussianStat& st = n.continuous[slot];
      if (st.n == 0) continue;
      continuous[attrs.continuous_names()[slot]] = {
          {"n", st.n}, {"mean", st.mean}, {"std", st.stddev()}, {"m2", st.m2}};
    }
    entry["continuous"] = std::move(continuous);
    nodes.push_back(std::move(entry));
  }
  doc["nodes"] = std::move(nodes);
  return doc;
}

CobwebTree tree_from_document(const json& doc) {
  try {
    if (doc.at("format").get<std::string>() != "cobweb-tree") {
      throw DataError("not a cobweb-tree document");
    }
    const int version = doc.at("formatVersion").get<int>();
    if (version != kTreeFormatVersion) {
      throw DataError("unsupported tree formatVersion " + std::to_string(version));
    }
    const double acuity = doc.at("acuity").get<double>();
    if (!(acuity > 0.0)) throw DataError("acuity must be positive");
    TieBreak ties = TieBreak::kPrecedence;
    if (doc.contains("tieBreak")) {
      const auto name = doc.at("tieBreak").get<std::string>();
      if (name == "hashed") {
        ties = TieBreak::kHashed;
      } else if (name == "smallest") {
        ties = TieBreak::kSmallest;
      } else if (name != "precedence") {
        throw DataError("unknown tieBreak '" + name + "'");
      }
    }

    AttributeRegistry attrs;
    for (const auto& name : doc.at("nominalAttributes")) {
      attrs.add(name.get<std::string>(), AttributeKind::kNominal);
    }
    for (const auto& name : doc.at("continuousAttributes")) {
      attrs.add(name.get<std::string>(), AttributeKind::kContinuous);
    }
    SymbolTable symbols;
    for (const auto& name : doc.at("symbols")) {
      const auto s = name.get<std::string>();
      const Symbol id = symbols.intern(s);
      if (id + 1 != symbols.size()) throw DataError("duplicate symbol '" + s + "'");
    }

    const auto next_id = doc.at("nextId").get<NodeId>();
    const auto root = doc.at("root").get<NodeId>();
    std::vector<std::optional<ConceptNode>> nodes(next_id);
    for (const auto& entry : doc.at("nodes")) {
      const auto id = entry.at("id").get<NodeId>();
      if (id >= next_id || nodes[id]) throw DataError("bad or repeated node id " + std::to_string(id));
      ConceptNode n;
      n.id = id;
      n.parent = entry.at("parent").is_null() ? kNoNode : entry.at("parent").get<NodeId>();
      n.children = entry.at("children").get<std::vector<NodeId>>();
      for (NodeId c : n.children) {
        if (c >= next_id) throw DataError("child id out of range");
      }
      n.count = entry.at("count").get<std::uint64_t>();
      for (const auto& [attr, counts] : entry.at("nominal").items()) {
        const auto slot = attrs.find(attr);
        if (!slot || slot->kind != AttributeKind::kNominal) {
          throw DataError("unknown nominal attribute '" + attr + "'");
        }
        if (n.nominal.size() <= slot->index) n.nominal.resize(slot->index + 1);
        auto& table = n.nominal[slot->index];
        for (const auto& [name, c] : counts.items()) {
          const auto symbol = symbols.find(name);
          if (!symbol) throw DataError("unknown symbol '" + name + "'");
          table.push_back(ValueCount{*symbol, c.get<std::uint64_t>()});
        }
        std::sort(table.begin(), table.end(),
                  [](const ValueCount& a, const ValueCount& b) { return a.symbol < b.symbol; });
      }
      for (const auto& [attr, stat] : entry.at("continuous").items()) {
        const auto slot = attrs.find(attr);
        if (!slot || slot->kind != AttributeKind::kContinuous) {
          throw DataError("unknown continuous attribute '" + attr + "'");
        }
        if (n.continuous.size() <= slot->index) n.continuous.resize(slot->index + 1);
        GaussianStat& st = n.continuous[slot->index];
        st.n = stat.at("n").get<std::uint64_t>();
        st.mean = stat.at("mean").get<double>();
        if (stat.contains("m2")) {
          st.m2 = stat.at("m2").get<double>();
        } else {
          const double sd = stat.at("std").get<double>();
          st.m2 = sd * sd * static_cast<double>(st.n);
        }
      }
      nodes[id] = std::move(n);
    }
    if (root >= next_id || !nodes[root]) throw DataError("root id does not name a node");
    try {
      return CobwebTree::from_parts(acuity, std::move(attrs), std::move(symbols), std::move(nodes),
                                    root, ties);
    } catch (const InvariantError& e) {
      throw DataError(std::string("inconsistent tree: ") + e.what());
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed tree document: ") + e.what());
  }
}

}  // namespace detail

std::string tree_to_json(const CobwebTree& tree) { return detail::tree_document(tree).dump(); }

CobwebTree tree_from_json(std::string_view document) {
  return detail::tree_from_document(detail::parse_document(document));
}

namespace {

std::string escape_record(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == '{' || c == '}' || c == '|' || c == '<' || c == '>' || c == '"' || c == '\\') {
      out.push_back('\\');
    }
    out.push_back(c);
  }
  return out;
}

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::fixed << v;
  return os.str();
}

}  // namespace

std::string default_node_label(const CobwebTree& tree, const ConceptNode& node) {
  std::ostringstream os;
  os << "id " << node.id << "|count " << node.count;
  struct Entry {
    double p;
    std::string text;
  };
  std::vector<Entry> entries;
  const auto& attrs = tree.attributes();
  for (std::uint32_t slot = 0; slot < node.nominal.size(); ++slot) {
    for (const auto& vc : node.nominal[slot]) {
      const double p = static_cast<double>(vc.count) / static_cast<double>(node.count);
      entries.push_back({p, attrs.nominal_names()[slot] + "=" + tree.symbols().name(vc.symbol) +
                                ": " + format_number(p)});
    }
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) { return a.p > b.p; });
  if (entries.size() > 3) entries.resize(3);
  if (entries.empty()) {
    for (std::uint32_t slot = 0; slot < node.continuous.size() && entries.size() < 3; ++slot) {
      const GaussianStat& st = node.continuous[slot];
      if (st.n == 0) continue;
      entries.push_back({0.0, attrs.continuous_names()[slot] + ": " + format_number(st.mean) +
                                  " sd " + format_number(st.stddev())});
    }
  }
  for (const auto& e : entries) os << "|" << escape_record(e.text);
  return os.str();
}

std::string to_dot(const CobwebTree& tree, std::string_view graph_name, const NodeLabeler& labeler) {
  std::ostringstream os;
  os << "digraph \"" << graph_name << "\" {\n  node [shape=record];\n";
  const auto order = tree.depth_first();
  for (NodeId id : order) {
    os << "  n" << id << " [label=\"{" << labeler(tree, tree.node(id)) << "}\"];\n";
  }
  for (NodeId id : order) {
    for (NodeId c : tree.node(id).children) os << "  n" << id << " -> n" << c << ";\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace cobweb
