#pragma once

// Shared fixtures for the unit tests.

#include <cstdint>
#include <vector>

#include "obddproof/bdd.hpp"
#include "obddproof/cnf.hpp"
#include "obddproof/oracle.hpp"
#include "obddproof/order.hpp"

namespace obddproof::testing {

inline oracle::TruthTable random_table(std::size_t vars, SeededRng& rng) {
  oracle::TruthTable t(vars);
  for (std::size_t r = 0; r < t.rows(); ++r) t.set(r, rng.next() & 1u);
  return t;
}

// Random width-1..max_width clauses over `vars` variables; never tautological.
inline CnfFormula random_cnf(std::size_t vars, std::size_t clauses, std::size_t max_width, SeededRng& rng) {
  CnfFormula f(vars);
  for (std::size_t c = 0; c < clauses; ++c) {
    std::vector<std::uint32_t> pool(vars);
    for (std::uint32_t v = 0; v < vars; ++v) pool[v] = v;
    rng.shuffle(pool);
    const std::size_t width = 1 + rng.below(std::min(max_width, vars));
    std::vector<Literal> lits;
    for (std::size_t k = 0; k < width; ++k) lits.push_back({VarId(pool[k]), (rng.next() & 1u) != 0});
    f.add_clause(Clause(lits));
  }
  return f;
}

inline VarOrder random_order(std::size_t vars, SeededRng& rng) {
  auto seq = VarOrder::identity(vars).sequence();
  rng.shuffle(seq);
  return VarOrder::from_sequence(seq);
}

// Sum of minterms, built only through the engine's apply/negate.
inline NodeRef engine_build(const oracle::TruthTable& t, NodeStore& store) {
  NodeRef acc = NodeRef::False();
  for (std::size_t row = 0; row < t.rows(); ++row) {
    if (!t.get(row)) continue;
    NodeRef term = NodeRef::True();
    for (std::uint32_t v = 0; v < t.num_vars(); ++v) {
      term = store.conjoin(term, store.literal(VarId(v), ((row >> v) & 1u) == 0));
    }
    acc = store.disjoin(acc, term);
  }
  return acc;
}

}  // namespace obddproof::testing
