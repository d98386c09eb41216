#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "obddproof/bdd.hpp"

namespace obddproof {

struct Literal {
  VarId var;
  bool negative = false;

  // DIMACS variable k is VarId k-1.
  int to_dimacs() const { return negative ? -static_cast<int>(var.index + 1) : static_cast<int>(var.index + 1); }
  static Literal from_dimacs(int lit);

  friend auto operator<=>(const Literal&, const Literal&) = default;
};

// A simple clause: duplicate literals are collapsed (first occurrence kept),
// complementary literals are rejected with std::invalid_argument.
class Clause {
 public:
  Clause() = default;
  explicit Clause(std::vector<Literal> literals);

  const std::vector<Literal>& literals() const { return literals_; }
  std::size_t width() const { return literals_.size(); }
  bool empty() const { return literals_.empty(); }
  bool mentions(VarId v) const;
  bool is_positive() const;  // every literal unnegated
  bool satisfied_by(std::uint64_t bits) const;

  friend bool operator==(const Clause&, const Clause&) = default;

 private:
  std::vector<Literal> literals_;
};

// Clause list order is the Axiom index space used by schedules.
class CnfFormula {
 public:
  CnfFormula() = default;
  explicit CnfFormula(std::size_t num_vars, std::string label = {}) : num_vars_(num_vars), label_(std::move(label)) {}

  // Throws std::invalid_argument if a literal refers to an undeclared variable.
  void add_clause(Clause c);

  std::size_t num_vars() const { return num_vars_; }
  std::size_t num_clauses() const { return clauses_.size(); }
  const std::vector<Clause>& clauses() const { return clauses_; }
  const Clause& clause(std::size_t i) const { return clauses_.at(i); }
  const std::string& label() const { return label_; }
  void set_label(std::string label) { label_ = std::move(label); }

  friend bool operator==(const CnfFormula&, const CnfFormula&) = default;

 private:
  std::size_t num_vars_ = 0;
  std::vector<Clause> clauses_;
  std::string label_;
};

// Pigeon i (1..n+1) in hole j (1..n) is VarId (i-1)*n + (j-1).
class PigeonMap {
 public:
  PigeonMap() = default;
  explicit PigeonMap(int holes);

  int holes() const { return n_; }
  int pigeons() const { return n_ + 1; }
  std::size_t num_vars() const { return static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_ + 1); }

  VarId var(int pigeon, int hole) const;
  int pigeon_of(VarId v) const;
  int hole_of(VarId v) const;

  // {"n": n, "vars": [{"pigeon": i, "hole": j, "dimacs": v}, ...]}
  std::string to_json() const;
  static PigeonMap from_json(std::string_view text);

  friend bool operator==(const PigeonMap&, const PigeonMap&) = default;

 private:
  int n_ = 0;
};

struct PhpInstance {
  CnfFormula formula;
  PigeonMap map;

  std::size_t num_positive() const { return static_cast<std::size_t>(map.pigeons()); }
};

// PC_n (one clause per pigeon) followed by NC_n in (hole, i, j) order.
PhpInstance gen_php(int n);
// The first n pigeon clauses over the full n(n+1)-variable universe.
CnfFormula gen_pc_star(int n);

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Accepts LF or CRLF. Rejects malformed headers, out-of-range literals,
// empty clauses, unterminated clauses and clause-count mismatches.
CnfFormula parse_dimacs(std::string_view text);
std::string write_dimacs(const CnfFormula& f);

// Chain of |c| decision nodes; an empty clause yields FALSE with a warning.
NodeRef clause_to_bdd(const Clause& c, NodeStore& store);
// Left fold of every clause with AND; TRUE for the empty formula.
NodeRef formula_to_bdd(const CnfFormula& f, NodeStore& store);

}  // namespace obddproof
