#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "obddproof/bdd.hpp"
#include "obddproof/cnf.hpp"

namespace obddproof {

enum class OrderKind { RowMajor, ColumnMajor, Random, Explicit };

// A permutation of a formula's variables plus how it was produced.
struct VarOrderSpec {
  VarOrder order;
  OrderKind kind = OrderKind::Explicit;
  std::optional<std::uint64_t> seed;

  std::size_t size() const { return order.size(); }
  // "row-major", "column-major", "random:<seed>" or "explicit".
  std::string label() const;

  static VarOrderSpec row_major(std::size_t num_vars);
  // Pigeons vary fastest: P_11, P_21, ..., P_{n+1,1}, P_12, ...
  static VarOrderSpec column_major(const PigeonMap& map);
  static VarOrderSpec random(std::size_t num_vars, std::uint64_t seed);
  static VarOrderSpec explicit_order(std::vector<VarId> sequence);
};

// Portable seeded generator: identical streams on every platform and
// standard library, unlike std::uniform_int_distribution/std::shuffle.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  // Uniform in [0, bound).
  std::uint64_t below(std::uint64_t bound);

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::uint64_t state_;
};

// CLI syntax: row-major | column-major | random:<seed> | file:<path>, where
// the file holds whitespace-separated DIMACS variable numbers.
VarOrderSpec parse_order_spec(std::string_view spec, std::size_t num_vars, const std::optional<PigeonMap>& map);

}  // namespace obddproof
