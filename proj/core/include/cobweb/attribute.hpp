#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

namespace cobweb {

// Interned nominal value. Only meaningful together with the SymbolTable of
// the tree that produced it.
using Symbol = std::uint32_t;

enum class AttributeKind : std::uint8_t { kNominal, kContinuous };

std::string_view to_string(AttributeKind kind);

// A nominal symbol or a continuous (unitless) real.
using AttributeValue = std::variant<std::string, double>;

inline bool is_nominal(const AttributeValue& v) { return std::holds_alternative<std::string>(v); }

// Unordered attribute-name -> value collection with unique names. Any
// attribute may be omitted.
class Instance {
 public:
  using Entry = std::pair<std::string, AttributeValue>;

  Instance() = default;
  Instance(std::initializer_list<Entry> entries);

  // Inserts or replaces.
  void set(std::string name, AttributeValue value);
  bool erase(std::string_view name);
  const AttributeValue* find(std::string_view name) const;

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

 private:
  std::vector<Entry> entries_;
};

class SymbolTable {
 public:
  Symbol intern(std::string_view name);
  std::optional<Symbol> find(std::string_view name) const;
  const std::string& name(Symbol symbol) const { return names_.at(symbol); }
  std::size_t size() const { return names_.size(); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, Symbol> index_;
};

// Maps attribute names to dense per-kind slots. Nominal and continuous
// attributes are numbered independently, in first-seen order.
class AttributeRegistry {
 public:
  struct Slot {
    AttributeKind kind;
    std::uint32_t index;
  };

  std::optional<Slot> find(std::string_view name) const;
  // Registers the attribute if new. Throws VariantMismatchError when the
  // name is already registered with the other kind.
  Slot add(std::string_view name, AttributeKind kind);

  const std::vector<std::string>& nominal_names() const { return nominal_; }
  const std::vector<std::string>& continuous_names() const { return continuous_; }
  std::size_t nominal_count() const { return nominal_.size(); }
  std::size_t continuous_count() const { return continuous_.size(); }

 private:
  std::vector<std::string> nominal_;
  std::vector<std::string> continuous_;
  std::unordered_map<std::string, Slot> index_;
};

// An instance resolved against one tree's registry and symbol table. Both
// lists are sorted by slot and carry no duplicate slots. This is the form
// the tree engine works on; hot loops build it directly.
struct CompiledInstance {
  std::vector<std::pair<std::uint32_t, Symbol>> nominal;
  std::vector<std::pair<std::uint32_t, double>> continuous;

  void sort();
  friend bool operator==(const CompiledInstance&, const CompiledInstance&) = default;
};

struct CompiledInstanceHash {
  std::size_t operator()(const CompiledInstance& inst) const noexcept;
};

}  // namespace cobweb
