#include "cobweb/attribute.hpp"

#include <algorithm>
#include <bit>

#include "cobweb/error.hpp"

namespace cobweb {

std::string_view to_string(AttributeKind kind) {
  return kind == AttributeKind::kNominal ? "nominal" : "continuous";
}

Instance::Instance(std::initializer_list<Entry> entries) {
  for (const auto& [name, value] : entries) set(name, value);
}

void Instance::set(std::string name, AttributeValue value) {
  for (auto& entry : entries_) {
    if (entry.first == name) {
      entry.second = std::move(value);
      return;
    }
  }
  entries_.emplace_back(std::move(name), std::move(value));
}

bool Instance::erase(std::string_view name) {
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [&](const Entry& e) { return e.first == name; });
  if (it == entries_.end()) return false;
  entries_.erase(it);
  return true;
}

const AttributeValue* Instance::find(std::string_view name) const {
  for (const auto& entry : entries_) {
    if (entry.first == name) return &entry.second;
  }
  return nullptr;
}

Symbol SymbolTable::intern(std::string_view name) {
  auto it = index_.find(std::string(name));
  if (it != index_.end()) return it->second;
  const auto symbol = static_cast<Symbol>(names_.size());
  names_.emplace_back(name);
  index_.emplace(names_.back(), symbol);
  return symbol;
}

std::optional<Symbol> SymbolTable::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<AttributeRegistry::Slot> AttributeRegistry::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

AttributeRegistry::Slot AttributeRegistry::add(std::string_view name, AttributeKind kind) {
  if (auto existing = find(name)) {
    if (existing->kind != kind) {
      throw VariantMismatchError("attribute '" + std::string(name) + "' is " +
                                 std::string(to_string(existing->kind)) + ", got a " +
                                 std::string(to_string(kind)) + " value");
    }
    return *existing;
  }
  auto& names = kind == AttributeKind::kNominal ? nominal_ : continuous_;
  const Slot slot{kind, static_cast<std::uint32_t>(names.size())};
  names.emplace_back(name);
  index_.emplace(std::string(name), slot);
  return slot;
}

void CompiledInstance::sort() {
  std::sort(nominal.begin(), nominal.end());
  std::sort(continuous.begin(), continuous.end());
}

std::size_t CompiledInstanceHash::operator()(const CompiledInstance& inst) const noexcept {
  // FNV-1a over slots and raw value bits.
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ULL;
  };
  for (const auto& [slot, symbol] : inst.nominal) {
    mix(slot);
    mix(symbol);
  }
  mix(0xffffffffULL);
  for (const auto& [slot, value] : inst.continuous) {
    mix(slot);
    mix(value == 0.0 ? 0 : std::bit_cast<std::uint64_t>(value));  // +0 == -0
  }
  return static_cast<std::size_t>(h);
}

}  // namespace cobweb
