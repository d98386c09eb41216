#include "obddproof/bdd.hpp"

#include <algorithm>
#include <atomic>
#include <string>

namespace obddproof {

namespace {

std::atomic<std::uint32_t> next_store_tag{1};

inline std::size_t triple_hash(std::uint32_t a, std::uint32_t b, std::uint32_t c) {
  std::uint64_t x = (std::uint64_t{a} * 0x9E3779B1u) ^ (std::uint64_t{b} << 21) ^ (std::uint64_t{c} * 0x85EBCA77u);
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return static_cast<std::size_t>(x);
}

}  // namespace

// ---------------------------------------------------------------- VarOrder

VarOrder VarOrder::identity(std::size_t num_vars) {
  std::vector<VarId> seq(num_vars);
  for (std::size_t i = 0; i < num_vars; ++i) seq[i] = VarId(static_cast<std::uint32_t>(i));
  return from_sequence(std::move(seq));
}

VarOrder VarOrder::from_sequence(std::vector<VarId> sequence) {
  VarOrder o;
  const auto n = sequence.size();
  o.position_.assign(n, std::numeric_limits<std::uint32_t>::max());
  for (std::size_t p = 0; p < n; ++p) {
    const auto v = sequence[p].index;
    if (v >= n) {
      throw std::invalid_argument("variable order: variable " + std::to_string(v) + " out of range for " +
                                  std::to_string(n) + " variables");
    }
    if (o.position_[v] != std::numeric_limits<std::uint32_t>::max()) {
      throw std::invalid_argument("variable order: variable " + std::to_string(v) + " listed twice");
    }
    o.position_[v] = static_cast<std::uint32_t>(p);
  }
  o.by_position_ = std::move(sequence);
  return o;
}

// -------------------------------------------------------------- Assignment

Assignment Assignment::from_bits(std::size_t universe, std::uint64_t bits) {
  if (universe > 64) throw std::invalid_argument("Assignment::from_bits: universe exceeds 64 variables");
  Assignment a(universe);
  for (std::size_t v = 0; v < universe; ++v) a.values_[v] = static_cast<std::int8_t>((bits >> v) & 1u);
  return a;
}

NodeBudgetExceeded::NodeBudgetExceeded(std::size_t budget)
    : std::runtime_error("node budget of " + std::to_string(budget) + " nodes exceeded"), budget_(budget) {}

// --------------------------------------------------------------- NodeStore

std::size_t NodeStore::CacheKeyHash::operator()(const CacheKey& k) const noexcept {
  return triple_hash(k.op, k.a, k.b);
}

NodeStore::NodeStore(VarOrder order, StoreLimits limits)
    : order_(std::move(order)), limits_(limits), tag_(next_store_tag.fetch_add(1)) {
  nodes_.push_back({kTerminalLevel, 0, 0});
  nodes_.push_back({kTerminalLevel, 1, 1});
  table_.assign(1024, 0);
}

bool NodeStore::owns(NodeRef f) const {
  if (f.is_terminal()) return f.store_tag() == 0;
  return f.store_tag() == tag_ && f.id() < nodes_.size();
}

std::uint32_t NodeStore::unwrap(NodeRef f) const {
  if (!owns(f)) {
    throw StoreMismatch("NodeRef does not belong to this NodeStore (functions from different orders never mix)");
  }
  return f.id();
}

void NodeStore::grow_table() {
  std::vector<std::uint32_t> fresh(table_.size() * 2, 0);
  const std::size_t mask = fresh.size() - 1;
  for (std::uint32_t id = 2; id < nodes_.size(); ++id) {
    const Node& n = nodes_[id];
    std::size_t slot = triple_hash(n.level, n.low, n.high) & mask;
    while (fresh[slot] != 0) slot = (slot + 1) & mask;
    fresh[slot] = id;
  }
  table_ = std::move(fresh);
}

std::uint32_t NodeStore::find_or_add(std::uint32_t level, std::uint32_t low, std::uint32_t high) {
  if (low == high) return low;
  const std::size_t mask = table_.size() - 1;
  std::size_t slot = triple_hash(level, low, high) & mask;
  while (table_[slot] != 0) {
    const Node& n = nodes_[table_[slot]];
    if (n.level == level && n.low == low && n.high == high) return table_[slot];
    slot = (slot + 1) & mask;
  }
  if (node_count() >= limits_.node_budget) throw NodeBudgetExceeded(limits_.node_budget);
  if (nodes_.size() >= std::numeric_limits<std::uint32_t>::max() - 1) throw NodeBudgetExceeded(nodes_.size());
  const auto id = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back({level, low, high});
  table_[slot] = id;
  if (2 * node_count() > table_.size()) grow_table();
  return id;
}

NodeRef NodeStore::make_node(VarId var, NodeRef low, NodeRef high) {
  if (var.index >= num_vars()) {
    throw std::invalid_argument("make_node: variable " + std::to_string(var.index) + " not declared");
  }
  const auto lo = unwrap(low);
  const auto hi = unwrap(high);
  const auto level = order_.position(var);
  for (auto child : {lo, hi}) {
    if (level_of(child) <= level) {
      throw OrderingError("make_node: child variable " + std::to_string(order_.at(level_of(child)).index) +
                          " does not follow variable " + std::to_string(var.index) + " in the order");
    }
  }
  return wrap(find_or_add(level, lo, hi));
}

NodeRef NodeStore::literal(VarId v, bool negative) {
  return negative ? make_node(v, NodeRef::True(), NodeRef::False()) : make_node(v, NodeRef::False(), NodeRef::True());
}

std::optional<std::uint32_t> NodeStore::cache_get(CacheOp op, std::uint32_t a, std::uint32_t b) const {
  auto it = cache_.find(CacheKey{static_cast<std::uint32_t>(op), a, b});
  if (it == cache_.end()) return std::nullopt;
  return it->second;
}

void NodeStore::cache_put(CacheOp op, std::uint32_t a, std::uint32_t b, std::uint32_t result) {
  if (limits_.cache_capacity != 0 && cache_.size() >= limits_.cache_capacity) cache_.clear();
  cache_.emplace(CacheKey{static_cast<std::uint32_t>(op), a, b}, result);
}

std::uint32_t NodeStore::apply_rec(CacheOp op, std::uint32_t f, std::uint32_t g) {
  if (op == CacheOp::And) {
    if (f == 0 || g == 0) return 0;
    if (f == 1) return g;
    if (g == 1 || f == g) return f;
  } else {
    if (f == 1 || g == 1) return 1;
    if (f == 0) return g;
    if (g == 0 || f == g) return f;
  }
  if (f > g) std::swap(f, g);
  if (auto hit = cache_get(op, f, g)) return *hit;

  const Node nf = nodes_[f];
  const Node ng = nodes_[g];
  const std::uint32_t level = std::min(nf.level, ng.level);
  const std::uint32_t f0 = nf.level == level ? nf.low : f;
  const std::uint32_t f1 = nf.level == level ? nf.high : f;
  const std::uint32_t g0 = ng.level == level ? ng.low : g;
  const std::uint32_t g1 = ng.level == level ? ng.high : g;
  const std::uint32_t lo = apply_rec(op, f0, g0);
  const std::uint32_t hi = apply_rec(op, f1, g1);
  const std::uint32_t r = find_or_add(level, lo, hi);
  cache_put(op, f, g, r);
  return r;
}

NodeRef NodeStore::apply(BoolOp op, NodeRef f, NodeRef g) {
  const auto a = unwrap(f);
  const auto b = unwrap(g);
  return wrap(apply_rec(op == BoolOp::And ? CacheOp::And : CacheOp::Or, a, b));
}

std::uint32_t NodeStore::not_rec(std::uint32_t f) {
  if (f < 2) return 1 - f;
  if (auto hit = cache_get(CacheOp::Not, f, 0)) return *hit;
  const Node n = nodes_[f];
  const std::uint32_t lo = not_rec(n.low);
  const std::uint32_t hi = not_rec(n.high);
  const std::uint32_t r = find_or_add(n.level, lo, hi);
  cache_put(CacheOp::Not, f, 0, r);
  return r;
}

NodeRef NodeStore::negate(NodeRef f) { return wrap(not_rec(unwrap(f))); }

std::uint32_t NodeStore::restrict_rec(std::uint32_t f, std::uint32_t level, bool value) {
  const Node n = nodes_[f];
  if (n.level > level) return f;
  if (n.level == level) return value ? n.high : n.low;
  const CacheOp op = value ? CacheOp::Restrict1 : CacheOp::Restrict0;
  if (auto hit = cache_get(op, f, level)) return *hit;
  const std::uint32_t lo = restrict_rec(n.low, level, value);
  const std::uint32_t hi = restrict_rec(n.high, level, value);
  const std::uint32_t r = find_or_add(n.level, lo, hi);
  cache_put(op, f, level, r);
  return r;
}

NodeRef NodeStore::restrict(NodeRef f, VarId v, bool value) {
  const auto id = unwrap(f);
  if (v.index >= num_vars()) throw std::invalid_argument("restrict: variable not declared");
  return wrap(restrict_rec(id, order_.position(v), value));
}

std::uint32_t NodeStore::exists_rec(std::uint32_t f, std::uint32_t level) {
  const Node n = nodes_[f];
  if (n.level > level) return f;
  if (n.level == level) return apply_rec(CacheOp::Or, n.low, n.high);
  if (auto hit = cache_get(CacheOp::Exists, f, level)) return *hit;
  const std::uint32_t lo = exists_rec(n.low, level);
  const std::uint32_t hi = exists_rec(n.high, level);
  const std::uint32_t r = find_or_add(n.level, lo, hi);
  cache_put(CacheOp::Exists, f, level, r);
  return r;
}

NodeRef NodeStore::exists(NodeRef f, VarId v) {
  const auto id = unwrap(f);
  if (v.index >= num_vars()) throw std::invalid_argument("exists: variable not declared");
  return wrap(exists_rec(id, order_.position(v)));
}

bool NodeStore::evaluate(NodeRef f, const Assignment& a) const {
  std::uint32_t id = unwrap(f);
  while (id >= 2) {
    const Node& n = nodes_[id];
    const VarId v = order_.at(n.level);
    const auto value = a.get(v);
    if (!value) {
      throw std::invalid_argument("evaluate: assignment does not cover variable " + std::to_string(v.index));
    }
    id = *value ? n.high : n.low;
  }
  return id == 1;
}

bool NodeStore::evaluate_bits(NodeRef f, std::uint64_t bits) const {
  std::uint32_t id = unwrap(f);
  while (id >= 2) {
    const Node& n = nodes_[id];
    const auto v = order_.at(n.level).index;
    if (v >= 64) throw std::invalid_argument("evaluate_bits: variable beyond 64-bit assignment");
    id = ((bits >> v) & 1u) ? n.high : n.low;
  }
  return id == 1;
}

template <class Visit>
void NodeStore::for_each_reachable(std::uint32_t root, Visit&& visit) const {
  if (root < 2) return;
  if (marks_.size() < nodes_.size()) marks_.resize(nodes_.size(), 0);
  if (++epoch_ == 0) {
    std::fill(marks_.begin(), marks_.end(), 0);
    epoch_ = 1;
  }
  std::vector<std::uint32_t> stack{root};
  marks_[root] = epoch_;
  while (!stack.empty()) {
    const auto id = stack.back();
    stack.pop_back();
    visit(id);
    for (auto child : {nodes_[id].low, nodes_[id].high}) {
      if (child >= 2 && marks_[child] != epoch_) {
        marks_[child] = epoch_;
        stack.push_back(child);
      }
    }
  }
}

std::size_t NodeStore::size(NodeRef f) const {
  std::size_t count = 0;
  for_each_reachable(unwrap(f), [&](std::uint32_t) { ++count; });
  return count;
}

std::vector<VarId> NodeStore::support(NodeRef f) const {
  std::vector<bool> seen(num_vars(), false);
  for_each_reachable(unwrap(f), [&](std::uint32_t id) { seen[nodes_[id].level] = true; });
  std::vector<VarId> out;
  for (std::uint32_t level = 0; level < seen.size(); ++level) {
    if (seen[level]) out.push_back(order_.at(level));
  }
  return out;
}

BigInt NodeStore::sat_count(NodeRef f, std::size_t universe_size) const {
  const auto root = unwrap(f);
  for (VarId v : support(f)) {
    if (v.index >= universe_size) {
      throw std::invalid_argument("sat_count: function depends on variable " + std::to_string(v.index) +
                                  " outside the universe of " + std::to_string(universe_size));
    }
  }
  const auto n = static_cast<std::uint32_t>(num_vars());
  auto level = [&](std::uint32_t id) { return id < 2 ? n : nodes_[id].level; };
  std::unordered_map<std::uint32_t, BigInt> memo;
  // Models over the variables at levels >= level(id).
  auto count = [&](auto&& self, std::uint32_t id) -> BigInt {
    if (id < 2) return BigInt(id);
    if (auto it = memo.find(id); it != memo.end()) return it->second;
    const Node& node = nodes_[id];
    BigInt lo = self(self, node.low) << (level(node.low) - node.level - 1);
    BigInt hi = self(self, node.high) << (level(node.high) - node.level - 1);
    BigInt r = lo + hi;
    memo.emplace(id, r);
    return r;
  };
  BigInt total = count(count, root) << level(root);
  // Rescale from the store's universe to the requested one.
  if (universe_size >= n) return total << (universe_size - n);
  return total >> (n - universe_size);
}

VarId NodeStore::top_var(NodeRef f) const {
  const auto id = unwrap(f);
  if (id < 2) throw std::invalid_argument("top_var: terminal has no variable");
  return order_.at(nodes_[id].level);
}

NodeRef NodeStore::low(NodeRef f) const {
  const auto id = unwrap(f);
  if (id < 2) throw std::invalid_argument("low: terminal has no children");
  return wrap(nodes_[id].low);
}

NodeRef NodeStore::high(NodeRef f) const {
  const auto id = unwrap(f);
  if (id < 2) throw std::invalid_argument("high: terminal has no children");
  return wrap(nodes_[id].high);
}

std::optional<std::vector<std::pair<VarId, bool>>> NodeStore::find_difference(NodeRef f, NodeRef g) const {
  std::uint32_t a = unwrap(f);
  std::uint32_t b = unwrap(g);
  if (a == b) return std::nullopt;
  std::vector<std::pair<VarId, bool>> path;
  // Canonicity: distinct ids are distinct functions, so some branch differs.
  while (a >= 2 || b >= 2) {
    const std::uint32_t level = std::min(nodes_[a].level, nodes_[b].level);
    const std::uint32_t a0 = nodes_[a].level == level ? nodes_[a].low : a;
    const std::uint32_t a1 = nodes_[a].level == level ? nodes_[a].high : a;
    const std::uint32_t b0 = nodes_[b].level == level ? nodes_[b].low : b;
    const std::uint32_t b1 = nodes_[b].level == level ? nodes_[b].high : b;
    const bool take_high = a0 == b0;
    path.emplace_back(order_.at(level), take_high);
    a = take_high ? a1 : a0;
    b = take_high ? b1 : b0;
  }
  return path;
}

NodeRef NodeStore::import(const NodeStore& other, NodeRef f) {
  const auto root = other.unwrap(f);
  if (other.num_vars() > num_vars()) {
    // Only the variables actually used need to exist here.
    for (VarId v : other.support(f)) {
      if (v.index >= num_vars()) throw std::invalid_argument("import: variable not declared in target store");
    }
  }
  const bool same_order = other.order_ == order_;
  std::unordered_map<std::uint32_t, std::uint32_t> memo;
  auto rec = [&](auto&& self, std::uint32_t id) -> std::uint32_t {
    if (id < 2) return id;
    if (auto it = memo.find(id); it != memo.end()) return it->second;
    const Node& n = other.nodes_[id];
    const std::uint32_t lo = self(self, n.low);
    const std::uint32_t hi = self(self, n.high);
    std::uint32_t r;
    if (same_order) {
      r = find_or_add(n.level, lo, hi);
    } else {
      const VarId v = other.order_.at(n.level);
      const std::uint32_t x = find_or_add(order_.position(v), 0, 1);
      const std::uint32_t nx = find_or_add(order_.position(v), 1, 0);
      r = apply_rec(CacheOp::Or, apply_rec(CacheOp::And, nx, lo), apply_rec(CacheOp::And, x, hi));
    }
    memo.emplace(id, r);
    return r;
  };
  return wrap(rec(rec, root));
}

std::vector<ExportedNode> NodeStore::export_structure(NodeRef f) const {
  const auto root = unwrap(f);
  std::vector<ExportedNode> out;
  std::unordered_map<std::uint32_t, std::int64_t> index;
  auto ref = [&](std::uint32_t id) -> std::int64_t { return id == 0 ? -1 : id == 1 ? -2 : index.at(id); };
  auto rec = [&](auto&& self, std::uint32_t id) -> void {
    if (id < 2 || index.contains(id)) return;
    self(self, nodes_[id].low);
    self(self, nodes_[id].high);
    index.emplace(id, static_cast<std::int64_t>(out.size()));
    out.push_back({order_.at(nodes_[id].level), ref(nodes_[id].low), ref(nodes_[id].high)});
  };
  rec(rec, root);
  return out;
}

}  // namespace obddproof
