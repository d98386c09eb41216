#pragma once

// Reduced ordered BDD engine. One NodeStore owns every node built under one
// fixed variable order; nodes are hash-consed so that equal functions share a
// NodeRef. No complement edges, no garbage collection, no reordering.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace obddproof {

using BigInt = boost::multiprecision::cpp_int;

// Name of a propositional variable. Position in the order is a separate
// notion owned by VarOrder.
struct VarId {
  std::uint32_t index = 0;

  constexpr VarId() = default;
  constexpr explicit VarId(std::uint32_t i) : index(i) {}
  friend constexpr auto operator<=>(VarId, VarId) = default;
};

class NodeRef {
 public:
  constexpr NodeRef() = default;

  static constexpr NodeRef False() { return NodeRef(0, 0); }
  static constexpr NodeRef True() { return NodeRef(0, 1); }

  constexpr bool is_terminal() const { return id_ < 2; }
  constexpr bool is_false() const { return id_ == 0; }
  constexpr bool is_true() const { return id_ == 1; }

  constexpr std::uint32_t id() const { return id_; }
  constexpr std::uint32_t store_tag() const { return tag_; }

  friend constexpr bool operator==(NodeRef, NodeRef) = default;

 private:
  friend class NodeStore;
  constexpr NodeRef(std::uint32_t tag, std::uint32_t id) : tag_(tag), id_(id) {}

  std::uint32_t tag_ = 0;
  std::uint32_t id_ = 0;
};

// A total order on VarId 0..n-1. position(v) == 0 means v is queried first.
class VarOrder {
 public:
  VarOrder() = default;

  static VarOrder identity(std::size_t num_vars);
  // Throws std::invalid_argument unless `sequence` is a permutation of 0..n-1.
  static VarOrder from_sequence(std::vector<VarId> sequence);

  std::size_t size() const { return by_position_.size(); }
  std::uint32_t position(VarId v) const { return position_.at(v.index); }
  VarId at(std::uint32_t position) const { return by_position_.at(position); }
  const std::vector<VarId>& sequence() const { return by_position_; }

  friend bool operator==(const VarOrder&, const VarOrder&) = default;

 private:
  std::vector<VarId> by_position_;
  std::vector<std::uint32_t> position_;
};

// Total-or-partial map VarId -> {0,1}. evaluate() rejects a path that reaches
// an unassigned variable.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::size_t universe) : values_(universe, kUnset) {}

  // Bit v of `bits` is the value of variable v, for v < universe (≤ 64).
  static Assignment from_bits(std::size_t universe, std::uint64_t bits);

  std::size_t universe() const { return values_.size(); }
  void set(VarId v, bool value) { values_.at(v.index) = value ? 1 : 0; }
  std::optional<bool> get(VarId v) const {
    if (v.index >= values_.size() || values_[v.index] == kUnset) return std::nullopt;
    return values_[v.index] == 1;
  }

 private:
  static constexpr std::int8_t kUnset = -1;
  std::vector<std::int8_t> values_;
};

enum class BoolOp : std::uint8_t { And, Or };

class OrderingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class StoreMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NodeBudgetExceeded : public std::runtime_error {
 public:
  explicit NodeBudgetExceeded(std::size_t budget);
  std::size_t budget() const { return budget_; }

 private:
  std::size_t budget_;
};

struct StoreLimits {
  // Maximum number of internal nodes the store may hold.
  std::size_t node_budget = 50'000'000;
  // Operation cache entries before a full clear; 0 means unbounded.
  std::size_t cache_capacity = 0;
};

// One (var, low, high) triple per node, listed children-first, with child
// references given as indices into the list (-1 = FALSE, -2 = TRUE).
struct ExportedNode {
  VarId var;
  std::int64_t low;
  std::int64_t high;
  friend bool operator==(const ExportedNode&, const ExportedNode&) = default;
};

class NodeStore {
 public:
  explicit NodeStore(VarOrder order, StoreLimits limits = {});
  explicit NodeStore(std::size_t num_vars, StoreLimits limits = {})
      : NodeStore(VarOrder::identity(num_vars), limits) {}

  NodeStore(const NodeStore&) = delete;
  NodeStore& operator=(const NodeStore&) = delete;
  NodeStore(NodeStore&&) = default;
  NodeStore& operator=(NodeStore&&) = default;

  const VarOrder& order() const { return order_; }
  std::size_t num_vars() const { return order_.size(); }
  // Internal nodes currently stored (reachable or not).
  std::size_t node_count() const { return nodes_.size() - 2; }
  const StoreLimits& limits() const { return limits_; }

  bool owns(NodeRef f) const;

  // Returns `low` when low == high, otherwise the unique node for the triple.
  // Throws OrderingError when a non-terminal child is not strictly below var.
  NodeRef make_node(VarId var, NodeRef low, NodeRef high);
  NodeRef literal(VarId v, bool negative = false);

  NodeRef apply(BoolOp op, NodeRef f, NodeRef g);
  NodeRef conjoin(NodeRef f, NodeRef g) { return apply(BoolOp::And, f, g); }
  NodeRef disjoin(NodeRef f, NodeRef g) { return apply(BoolOp::Or, f, g); }
  NodeRef negate(NodeRef f);
  NodeRef restrict(NodeRef f, VarId v, bool value);
  NodeRef exists(NodeRef f, VarId v);

  bool evaluate(NodeRef f, const Assignment& a) const;
  // Fast path for universes of at most 64 variables: bit v is variable v.
  bool evaluate_bits(NodeRef f, std::uint64_t bits) const;

  // Number of reachable internal nodes.
  std::size_t size(NodeRef f) const;
  // Satisfying assignments over variables 0..universe_size-1. Throws if f
  // depends on a variable outside that range.
  BigInt sat_count(NodeRef f, std::size_t universe_size) const;
  // Variables f depends on, in order position.
  std::vector<VarId> support(NodeRef f) const;

  VarId top_var(NodeRef f) const;
  NodeRef low(NodeRef f) const;
  NodeRef high(NodeRef f) const;

  // Partial assignment on which f and g differ (unlisted variables are free),
  // or nullopt when f == g.
  std::optional<std::vector<std::pair<VarId, bool>>> find_difference(NodeRef f, NodeRef g) const;

  // Rebuilds a function owned by another store. Variables are matched by
  // VarId, so the other store may use a different order.
  NodeRef import(const NodeStore& other, NodeRef f);
  std::vector<ExportedNode> export_structure(NodeRef f) const;

  void clear_cache() { cache_.clear(); }
  std::size_t cache_size() const { return cache_.size(); }

 private:
  struct Node {
    std::uint32_t level;
    std::uint32_t low;
    std::uint32_t high;
  };

  enum class CacheOp : std::uint32_t { And, Or, Not, Restrict0, Restrict1, Exists };

  struct CacheKey {
    std::uint32_t op;
    std::uint32_t a;
    std::uint32_t b;
    friend bool operator==(const CacheKey&, const CacheKey&) = default;
  };
  struct CacheKeyHash {
    std::size_t operator()(const CacheKey& k) const noexcept;
  };

  static constexpr std::uint32_t kTerminalLevel = std::numeric_limits<std::uint32_t>::max();

  NodeRef wrap(std::uint32_t id) const { return id < 2 ? NodeRef(0, id) : NodeRef(tag_, id); }
  std::uint32_t unwrap(NodeRef f) const;
  std::uint32_t level_of(std::uint32_t id) const { return nodes_[id].level; }

  std::uint32_t find_or_add(std::uint32_t level, std::uint32_t low, std::uint32_t high);
  void grow_table();

  std::uint32_t apply_rec(CacheOp op, std::uint32_t f, std::uint32_t g);
  std::uint32_t not_rec(std::uint32_t f);
  std::uint32_t restrict_rec(std::uint32_t f, std::uint32_t level, bool value);
  std::uint32_t exists_rec(std::uint32_t f, std::uint32_t level);

  std::optional<std::uint32_t> cache_get(CacheOp op, std::uint32_t a, std::uint32_t b) const;
  void cache_put(CacheOp op, std::uint32_t a, std::uint32_t b, std::uint32_t result);

  template <class Visit>
  void for_each_reachable(std::uint32_t root, Visit&& visit) const;

  VarOrder order_;
  StoreLimits limits_;
  std::uint32_t tag_;
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> table_;  // open addressing over node ids, 0 = empty
  std::unordered_map<CacheKey, std::uint32_t, CacheKeyHash> cache_;
  mutable std::vector<std::uint32_t> marks_;
  mutable std::uint32_t epoch_ = 0;
};

}  // namespace obddproof
