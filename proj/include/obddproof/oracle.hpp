#pragma once

// Brute-force ground truth for small instances. Assignment encoding is
// little-endian in VarId: bit v of a row index is the value of variable v.
// Nothing here calls apply/restrict/exists, so it can check them.

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "obddproof/bdd.hpp"
#include "obddproof/cnf.hpp"

namespace obddproof::oracle {

class TruthTable {
 public:
  static constexpr std::size_t kMaxVars = 24;

  TruthTable() = default;
  explicit TruthTable(std::size_t num_vars, bool fill = false);
  // Table of a function of at most 6 variables given as a 64-bit word.
  static TruthTable from_word(std::size_t num_vars, std::uint64_t word);
  // '0'/'1' characters, row 0 first.
  static TruthTable from_bits(std::size_t num_vars, std::string_view bits);

  std::size_t num_vars() const { return num_vars_; }
  std::size_t rows() const { return std::size_t{1} << num_vars_; }
  bool get(std::size_t row) const { return (words_[row >> 6] >> (row & 63)) & 1u; }
  void set(std::size_t row, bool value);
  bool all_zero() const;
  bool all_one() const;
  std::size_t count_ones() const;
  std::string to_bits() const;

  friend bool operator==(const TruthTable&, const TruthTable&) = default;

 private:
  std::size_t num_vars_ = 0;
  std::vector<std::uint64_t> words_;
};

TruthTable table_of_cnf(const CnfFormula& f);
// Enumerates the engine function by evaluation (≤ 24 variables).
TruthTable table_of_bdd(const NodeStore& store, NodeRef f, std::size_t num_vars);

// Shannon expansion straight from the table using only make_node. The store
// order decides the decomposition; the table may cover fewer variables than
// the store.
NodeRef canonical_bdd(const TruthTable& t, NodeStore& store);

// Internal-node count of the reduced OBDD of t under `order`, computed by
// counting distinct subfunctions per level that depend on that level's
// variable. Never builds a BDD.
std::size_t reduced_size(const TruthTable& t, const VarOrder& order);

struct MinOrderResult {
  std::size_t size;
  VarOrder order;
};

// Exhaustive over all n! orders (n ≤ 7); the first minimal order in
// lexicographic permutation order is returned.
MinOrderResult min_size_over_orders(const TruthTable& t);

}  // namespace obddproof::oracle
