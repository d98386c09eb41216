#include "obddproof/oracle.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace obddproof::oracle {

TruthTable::TruthTable(std::size_t num_vars, bool fill) : num_vars_(num_vars) {
  if (num_vars > kMaxVars) {
    throw std::invalid_argument("truth table limited to " + std::to_string(kMaxVars) + " variables, got " +
                                std::to_string(num_vars));
  }
  const std::size_t n_rows = std::size_t{1} << num_vars;
  words_.assign((n_rows + 63) / 64, fill ? ~std::uint64_t{0} : 0);
  if (fill && n_rows < 64) words_[0] = (std::uint64_t{1} << n_rows) - 1;
}

TruthTable TruthTable::from_word(std::size_t num_vars, std::uint64_t word) {
  if (num_vars > 6) throw std::invalid_argument("from_word: at most 6 variables");
  TruthTable t(num_vars);
  const std::size_t n_rows = std::size_t{1} << num_vars;
  t.words_[0] = n_rows == 64 ? word : word & ((std::uint64_t{1} << n_rows) - 1);
  return t;
}

TruthTable TruthTable::from_bits(std::size_t num_vars, std::string_view bits) {
  TruthTable t(num_vars);
  if (bits.size() != t.rows()) {
    throw std::invalid_argument("truth table needs " + std::to_string(t.rows()) + " bits, got " +
                                std::to_string(bits.size()));
  }
  for (std::size_t r = 0; r < bits.size(); ++r) {
    if (bits[r] != '0' && bits[r] != '1') throw std::invalid_argument("truth table bits must be '0' or '1'");
    t.set(r, bits[r] == '1');
  }
  return t;
}

void TruthTable::set(std::size_t row, bool value) {
  const std::uint64_t mask = std::uint64_t{1} << (row & 63);
  if (value) {
    words_[row >> 6] |= mask;
  } else {
    words_[row >> 6] &= ~mask;
  }
}

bool TruthTable::all_zero() const {
  return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
}

bool TruthTable::all_one() const { return count_ones() == rows(); }

std::size_t TruthTable::count_ones() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::string TruthTable::to_bits() const {
  std::string s(rows(), '0');
  for (std::size_t r = 0; r < rows(); ++r) s[r] = get(r) ? '1' : '0';
  return s;
}

TruthTable table_of_cnf(const CnfFormula& f) {
  TruthTable t(f.num_vars(), true);
  for (std::size_t row = 0; row < t.rows(); ++row) {
    for (const Clause& c : f.clauses()) {
      if (!c.satisfied_by(row)) {
        t.set(row, false);
        break;
      }
    }
  }
  return t;
}

TruthTable table_of_bdd(const NodeStore& store, NodeRef f, std::size_t num_vars) {
  TruthTable t(num_vars);
  for (std::size_t row = 0; row < t.rows(); ++row) t.set(row, store.evaluate_bits(f, row));
  return t;
}

NodeRef canonical_bdd(const TruthTable& t, NodeStore& store) {
  if (t.num_vars() > 16) throw std::invalid_argument("canonical_bdd: at most 16 variables");
  if (t.num_vars() > store.num_vars()) throw std::invalid_argument("canonical_bdd: store has too few variables");
  const auto levels = static_cast<std::uint32_t>(store.num_vars());
  auto build = [&](auto&& self, std::uint32_t level, std::size_t row) -> NodeRef {
    if (level == levels) return t.get(row) ? NodeRef::True() : NodeRef::False();
    const VarId v = store.order().at(level);
    if (v.index >= t.num_vars()) return self(self, level + 1, row);
    const NodeRef lo = self(self, level + 1, row);
    const NodeRef hi = self(self, level + 1, row | (std::size_t{1} << v.index));
    return store.make_node(v, lo, hi);
  };
  return build(build, 0, 0);
}

std::size_t reduced_size(const TruthTable& t, const VarOrder& order) {
  const std::size_t n = t.num_vars();
  if (order.size() != n) throw std::invalid_argument("reduced_size: order does not match table");
  std::size_t total = 0;
  for (std::size_t level = 0; level < n; ++level) {
    const std::size_t rest = n - level;
    std::unordered_set<std::string> distinct;
    for (std::size_t prefix = 0; prefix < (std::size_t{1} << level); ++prefix) {
      std::size_t base = 0;
      for (std::size_t k = 0; k < level; ++k) {
        if ((prefix >> k) & 1u) base |= std::size_t{1} << order.at(static_cast<std::uint32_t>(k)).index;
      }
      std::string sub(std::size_t{1} << rest, '0');
      for (std::size_t suffix = 0; suffix < sub.size(); ++suffix) {
        std::size_t row = base;
        for (std::size_t k = 0; k < rest; ++k) {
          if ((suffix >> k) & 1u) row |= std::size_t{1} << order.at(static_cast<std::uint32_t>(level + k)).index;
        }
        sub[suffix] = t.get(row) ? '1' : '0';
      }
      // Bit 0 of `suffix` is this level's variable.
      bool depends = false;
      for (std::size_t s = 0; s < sub.size() && !depends; s += 2) depends = sub[s] != sub[s + 1];
      if (depends) distinct.insert(std::move(sub));
    }
    total += distinct.size();
  }
  return total;
}

MinOrderResult min_size_over_orders(const TruthTable& t) {
  if (t.num_vars() > 7) throw std::invalid_argument("min_size_over_orders: at most 7 variables");
  std::vector<VarId> perm = VarOrder::identity(t.num_vars()).sequence();
  std::optional<MinOrderResult> best;
  do {
    NodeStore store(VarOrder::from_sequence(perm));
    const std::size_t sz = store.size(canonical_bdd(t, store));
    if (!best || sz < best->size) best = MinOrderResult{sz, store.order()};
  } while (std::next_permutation(perm.begin(), perm.end()));
  return *best;
}

}  // namespace obddproof::oracle
