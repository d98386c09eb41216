#include <gtest/gtest.h>

#include <set>
#include <tuple>

#include "obddproof/bdd.hpp"
#include "obddproof/cnf.hpp"
#include "obddproof/oracle.hpp"
#include "support.hpp"

namespace obddproof {
namespace {

using testing::engine_build;
using testing::random_cnf;
using testing::random_order;
using testing::random_table;

const VarId x0{0}, x1{1}, x2{2}, x3{3};

TEST(MakeNode, LiteralFromTerminals) {
  NodeStore s(2);
  const NodeRef f = s.make_node(x0, NodeRef::False(), NodeRef::True());
  EXPECT_EQ(f, s.literal(x0));
  EXPECT_EQ(s.top_var(f), x0);
  EXPECT_EQ(s.low(f), NodeRef::False());
  EXPECT_EQ(s.high(f), NodeRef::True());
  EXPECT_EQ(s.size(f), 1u);
}

TEST(MakeNode, EliminatesRedundantTest) {
  NodeStore s(3);
  const NodeRef t = s.literal(x2);
  EXPECT_EQ(s.make_node(x0, t, t), t);
  EXPECT_EQ(s.make_node(x0, NodeRef::True(), NodeRef::True()), NodeRef::True());
}

TEST(MakeNode, HashConses) {
  NodeStore s(3);
  const NodeRef a = s.make_node(x1, NodeRef::False(), s.literal(x2));
  const std::size_t count = s.node_count();
  const NodeRef b = s.make_node(x1, NodeRef::False(), s.literal(x2));
  EXPECT_EQ(a, b);
  EXPECT_EQ(s.node_count(), count);
}

TEST(MakeNode, RejectsOrderingViolation) {
  NodeStore s(3);
  const NodeRef child = s.literal(x0);
  EXPECT_THROW(s.make_node(x1, child, NodeRef::True()), OrderingError);
  EXPECT_THROW(s.make_node(x0, child, NodeRef::True()), OrderingError);
}

TEST(MakeNode, OrderIsByPositionNotIndex) {
  NodeStore s(VarOrder::from_sequence({x2, x0, x1}));
  const NodeRef ok = s.make_node(x2, s.literal(x0), NodeRef::True());
  EXPECT_EQ(s.top_var(ok), x2);
  EXPECT_THROW(s.make_node(x0, s.literal(x2), NodeRef::True()), OrderingError);
}

TEST(Store, RejectsForeignNodes) {
  NodeStore a(2);
  NodeStore b(2);
  const NodeRef fa = a.literal(x0);
  EXPECT_THROW(b.conjoin(fa, b.literal(x1)), StoreMismatch);
  EXPECT_THROW((void)b.size(fa), StoreMismatch);
  // Terminals are shared by every store.
  EXPECT_EQ(b.conjoin(NodeRef::True(), b.literal(x1)), b.literal(x1));
}

TEST(Apply, IdentityAndAnnihilator) {
  NodeStore s(3);
  const NodeRef f = s.disjoin(s.literal(x0), s.literal(x2, true));
  EXPECT_EQ(s.conjoin(f, NodeRef::True()), f);
  EXPECT_EQ(s.conjoin(f, NodeRef::False()), NodeRef::False());
  EXPECT_EQ(s.disjoin(f, NodeRef::False()), f);
  EXPECT_EQ(s.disjoin(f, NodeRef::True()), NodeRef::True());
}

TEST(Apply, ComplementaryLiterals) {
  NodeStore s(1);
  EXPECT_EQ(s.disjoin(s.literal(x0), s.literal(x0, true)), NodeRef::True());
  EXPECT_EQ(s.conjoin(s.literal(x0), s.literal(x0, true)), NodeRef::False());
}

TEST(Apply, Php2ConjunctionIsFalse) {
  const PhpInstance php = gen_php(2);
  NodeStore s(php.formula.num_vars());
  EXPECT_EQ(formula_to_bdd(php.formula, s), NodeRef::False());
}

TEST(Apply, CommutativeResultsShareCacheEntry) {
  NodeStore s(4);
  const NodeRef f = s.disjoin(s.literal(x0), s.literal(x3));
  const NodeRef g = s.disjoin(s.literal(x1), s.literal(x2));
  const NodeRef fg = s.conjoin(f, g);
  const std::size_t cached = s.cache_size();
  EXPECT_EQ(s.conjoin(g, f), fg);
  EXPECT_EQ(s.cache_size(), cached);
}

TEST(Negate, Basics) {
  NodeStore s(2);
  EXPECT_EQ(s.negate(NodeRef::True()), NodeRef::False());
  EXPECT_EQ(s.negate(NodeRef::False()), NodeRef::True());
  const NodeRef n = s.negate(s.literal(x0));
  EXPECT_EQ(s.low(n), NodeRef::True());
  EXPECT_EQ(s.high(n), NodeRef::False());
}

TEST(Negate, InvolutionAndPointwise) {
  SeededRng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t vars = 1 + rng.below(10);
    const CnfFormula f = random_cnf(vars, 1 + rng.below(8), 4, rng);
    NodeStore s(random_order(vars, rng));
    const NodeRef g = formula_to_bdd(f, s);
    const NodeRef ng = s.negate(g);
    EXPECT_EQ(s.negate(ng), g);
    for (std::uint64_t row = 0; row < (1u << vars); ++row) {
      ASSERT_EQ(s.evaluate_bits(ng, row), !s.evaluate_bits(g, row));
    }
  }
}

TEST(Restrict, Examples) {
  NodeStore s(3);
  EXPECT_EQ(s.restrict(s.literal(x0), x0, true), NodeRef::True());
  EXPECT_EQ(s.restrict(s.literal(x0), x0, false), NodeRef::False());
  const NodeRef f = s.conjoin(s.literal(x1), s.literal(x2));
  EXPECT_EQ(s.restrict(f, x0, true), f);
}

TEST(Restrict, MatchesTruthTableCofactor) {
  SeededRng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const oracle::TruthTable t = random_table(8, rng);
    NodeStore s(random_order(8, rng));
    const NodeRef f = oracle::canonical_bdd(t, s);
    const VarId v(static_cast<std::uint32_t>(rng.below(8)));
    for (bool b : {false, true}) {
      const NodeRef r = s.restrict(f, v, b);
      for (const VarId w : s.support(r)) EXPECT_NE(w, v);
      for (std::uint64_t row = 0; row < t.rows(); ++row) {
        const std::uint64_t fixed = b ? row | (1u << v.index) : row & ~(std::uint64_t{1} << v.index);
        ASSERT_EQ(s.evaluate_bits(r, row), t.get(fixed));
      }
    }
  }
}

TEST(Exists, Examples) {
  NodeStore s(3);
  EXPECT_EQ(s.exists(s.literal(x0), x0), NodeRef::True());
  const NodeRef f = s.conjoin(s.literal(x1), s.literal(x2, true));
  EXPECT_EQ(s.exists(f, x0), f);
  EXPECT_EQ(s.exists(f, x1), s.literal(x2, true));
}

TEST(Exists, SoundAndSatPreserving) {
  SeededRng rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t vars = 2 + rng.below(9);
    const CnfFormula cnf = random_cnf(vars, 1 + rng.below(12), 3, rng);
    NodeStore s(random_order(vars, rng));
    const NodeRef f = formula_to_bdd(cnf, s);
    const VarId v(static_cast<std::uint32_t>(rng.below(vars)));
    const NodeRef e = s.exists(f, v);
    EXPECT_EQ(e.is_false(), f.is_false());
    const std::uint64_t bit = std::uint64_t{1} << v.index;
    for (std::uint64_t row = 0; row < (std::uint64_t{1} << vars); ++row) {
      ASSERT_EQ(s.evaluate_bits(e, row), s.evaluate_bits(f, row & ~bit) || s.evaluate_bits(f, row | bit));
    }
  }
}

TEST(Evaluate, TotalAndPartialAssignments) {
  NodeStore s(3);
  Assignment a(3);
  EXPECT_TRUE(s.evaluate(NodeRef::True(), a));
  const NodeRef f = s.disjoin(s.literal(x0), s.literal(x1, true));
  a.set(x0, false);
  EXPECT_THROW(s.evaluate(f, a), std::invalid_argument);
  a.set(x1, false);
  EXPECT_TRUE(s.evaluate(f, a));
  a.set(x1, true);
  EXPECT_FALSE(s.evaluate(f, a));
}

TEST(Evaluate, ClauseSemantics) {
  for (std::size_t k = 1; k <= 6; ++k) {
    NodeStore s(k);
    std::vector<Literal> lits;
    for (std::uint32_t v = 0; v < k; ++v) lits.push_back({VarId(v), v % 2 == 1});
    const Clause c(lits);
    const NodeRef f = clause_to_bdd(c, s);
    EXPECT_EQ(s.size(f), k);
    for (std::uint64_t row = 0; row < (1u << k); ++row) ASSERT_EQ(s.evaluate_bits(f, row), c.satisfied_by(row));
  }
}

TEST(Size, Terminals) {
  NodeStore s(1);
  EXPECT_EQ(s.size(NodeRef::False()), 0u);
  EXPECT_EQ(s.size(NodeRef::True()), 0u);
}

TEST(Size, PcStarMatchesOracle) {
  const CnfFormula pc = gen_pc_star(3);
  NodeStore s(pc.num_vars());
  const NodeRef f = formula_to_bdd(pc, s);
  const std::size_t oracle_size = oracle::reduced_size(oracle::table_of_cnf(pc), s.order());
  EXPECT_EQ(s.size(f), oracle_size);
  // Three independent width-3 chains stacked under row-major order.
  EXPECT_EQ(s.size(f), 9u);
}

TEST(SatCount, Examples) {
  NodeStore s(6);
  EXPECT_EQ(s.sat_count(NodeRef::True(), 6), BigInt(64));
  EXPECT_EQ(s.sat_count(NodeRef::False(), 6), BigInt(0));
  const PhpInstance php = gen_php(2);
  NodeStore p(php.formula.num_vars());
  EXPECT_EQ(p.sat_count(formula_to_bdd(php.formula, p), 6), BigInt(0));
  NodeStore q(6);
  const NodeRef pc = formula_to_bdd(gen_pc_star(2), q);
  EXPECT_EQ(q.sat_count(pc, 4), BigInt(9));
  EXPECT_EQ(q.sat_count(pc, 6), BigInt(36));
  EXPECT_THROW((void)q.sat_count(pc, 3), std::invalid_argument);
}

TEST(SatCount, LargeUniverse) {
  NodeStore s(100);
  EXPECT_EQ(s.sat_count(s.literal(VarId(99)), 100), BigInt(1) << 99);
}

// Every reachable node is reduced, unique and respects the order.
void expect_well_formed(const NodeStore& s, NodeRef f) {
  const auto nodes = s.export_structure(f);
  std::set<std::tuple<std::uint32_t, std::int64_t, std::int64_t>> seen;
  auto pos = [&](std::int64_t child) -> std::int64_t {
    return child < 0 ? std::numeric_limits<std::int64_t>::max() : s.order().position(nodes[child].var);
  };
  for (const auto& n : nodes) {
    EXPECT_NE(n.low, n.high);
    EXPECT_TRUE(seen.emplace(n.var.index, n.low, n.high).second);
    EXPECT_LT(static_cast<std::int64_t>(s.order().position(n.var)), pos(n.low));
    EXPECT_LT(static_cast<std::int64_t>(s.order().position(n.var)), pos(n.high));
  }
  EXPECT_EQ(nodes.size(), s.size(f));
}

TEST(Properties, ReducedAndOrderedAfterOperations) {
  SeededRng rng(3);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t vars = 3 + rng.below(8);
    NodeStore s(random_order(vars, rng));
    const NodeRef f = formula_to_bdd(random_cnf(vars, 6, 3, rng), s);
    const NodeRef g = formula_to_bdd(random_cnf(vars, 6, 3, rng), s);
    for (NodeRef h : {f, g, s.conjoin(f, g), s.disjoin(f, g), s.negate(f), s.exists(f, VarId(0)),
                      s.restrict(g, VarId(1), true)}) {
      expect_well_formed(s, h);
    }
  }
}

TEST(Properties, ApplySoundTwelveVariables) {
  SeededRng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    NodeStore s(random_order(12, rng));
    const NodeRef f = formula_to_bdd(random_cnf(12, 5 + rng.below(10), 4, rng), s);
    const NodeRef g = s.negate(formula_to_bdd(random_cnf(12, 3 + rng.below(6), 4, rng), s));
    const NodeRef a = s.conjoin(f, g);
    const NodeRef o = s.disjoin(f, g);
    for (std::uint64_t row = 0; row < 4096; ++row) {
      const bool fv = s.evaluate_bits(f, row);
      const bool gv = s.evaluate_bits(g, row);
      ASSERT_EQ(s.evaluate_bits(a, row), fv && gv);
      ASSERT_EQ(s.evaluate_bits(o, row), fv || gv);
    }
  }
}

TEST(Properties, CanonicalAgainstOracleSixVariables) {
  SeededRng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const oracle::TruthTable t = random_table(6, rng);
    NodeStore s(random_order(6, rng));
    EXPECT_EQ(engine_build(t, s), oracle::canonical_bdd(t, s));
  }
}

TEST(Import, AcrossOrders) {
  SeededRng rng(8);
  const CnfFormula cnf = random_cnf(7, 9, 3, rng);
  NodeStore a(VarOrder::identity(7));
  NodeStore b(random_order(7, rng));
  const NodeRef fa = formula_to_bdd(cnf, a);
  const NodeRef fb = b.import(a, fa);
  EXPECT_EQ(fb, formula_to_bdd(cnf, b));
  NodeStore c(VarOrder::identity(7));
  EXPECT_EQ(c.export_structure(c.import(a, fa)), a.export_structure(fa));
}

TEST(FindDifference, LocatesDisagreement) {
  NodeStore s(3);
  const NodeRef f = s.conjoin(s.literal(x0), s.literal(x1));
  const NodeRef g = s.literal(x0);
  EXPECT_FALSE(s.find_difference(f, f).has_value());
  const auto diff = s.find_difference(f, g);
  ASSERT_TRUE(diff.has_value());
  Assignment a(3);
  for (VarId v : {x0, x1, x2}) a.set(v, false);
  for (const auto& [v, b] : *diff) a.set(v, b);
  EXPECT_NE(s.evaluate(f, a), s.evaluate(g, a));
}

TEST(Budget, ThrowsWhenExceeded) {
  NodeStore s(VarOrder::identity(20), StoreLimits{10, 0});
  auto build = [&] {
    NodeRef f = NodeRef::False();
    for (std::uint32_t v = 0; v < 20; v += 2) f = s.disjoin(f, s.conjoin(s.literal(VarId(v)), s.literal(VarId(v + 1))));
    return f;
  };
  EXPECT_THROW(build(), NodeBudgetExceeded);
  EXPECT_LE(s.node_count(), 10u);
}

TEST(Cache, BoundedCacheKeepsResults) {
  SeededRng rng(4);
  const CnfFormula cnf = random_cnf(10, 20, 3, rng);
  NodeStore bounded(VarOrder::identity(10), StoreLimits{1'000'000, 8});
  NodeStore full(VarOrder::identity(10));
  const NodeRef a = formula_to_bdd(cnf, bounded);
  const NodeRef b = formula_to_bdd(cnf, full);
  EXPECT_LE(bounded.cache_size(), 8u);
  EXPECT_EQ(bounded.export_structure(a), full.export_structure(b));
}

}  // namespace
}  // namespace obddproof
