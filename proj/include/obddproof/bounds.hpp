#pragma once

// Executable counterparts of the pigeonhole lower-bound argument: the split
// of the PC* matrix by the variable order, the greedy row/column selection on
// a balanced two-colouring, the window lemma over union-built set sequences,
// the per-step column sets, and a checker for fooling-set certificates.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "obddproof/bdd.hpp"
#include "obddproof/cnf.hpp"
#include "obddproof/order.hpp"
#include "obddproof/refutation.hpp"

namespace obddproof::bounds {

// c = 1/2 - sqrt(2)/4 is the proven constant; 1 - sqrt(2)/2 is conjectured
// sharp and has no correctness guarantee here.
enum class LemmaConstant { Proven, Conjectured };

double constant_value(LemmaConstant c = LemmaConstant::Proven);

// floor(c*n), exact: uses the smallest s with s*s >= 2n^2 instead of
// floating point.
std::size_t floor_cn(std::size_t n, LemmaConstant c = LemmaConstant::Proven);

// 2^(n c / 4), a reference curve only.
double theoretical_bound(std::size_t n, LemmaConstant c = LemmaConstant::Proven);
// 2^(c/4).
double bound_base(LemmaConstant c = LemmaConstant::Proven);
// Exact integer argument that 2^(c/4) > 1.025 for the proven constant.
bool base_exceeds_1025_certified();

// --------------------------------------------------------------- ColorSplit

struct ColorSplit {
  std::size_t n = 0;
  VarOrderSpec order;
  std::vector<VarId> below;       // floor(n^2/2) order-smallest PC* variables
  std::vector<VarId> above;       // the rest of Var(PC*)
  std::vector<VarId> below_star;  // PHP variables no later than max(below)
  std::vector<VarId> above_star;  // Var(PHP) minus below_star

  bool is_below(VarId v) const;
  bool is_above(VarId v) const;
  bool is_below_star(VarId v) const;

  std::vector<bool> below_mask;
  std::vector<bool> above_mask;
  std::vector<bool> below_star_mask;
};

// The order must be a permutation of the n(n+1) PHP_n variables, numbered
// row-major as in PigeonMap.
ColorSplit color_split(const VarOrderSpec& order, std::size_t n);

// ---------------------------------------------------------- MatrixColoring

enum class Color : std::uint8_t { White, Black };

class MatrixColoring {
 public:
  // Throws std::invalid_argument if #white and #black differ by more than 1.
  MatrixColoring(std::size_t n, std::vector<Color> cells);

  // Lines of 'W'/'B' (case-insensitive); blank lines and '#' comments skipped.
  static MatrixColoring parse(std::string_view text);
  std::string to_string() const;

  std::size_t n() const { return n_; }
  // 0-based row and column.
  Color at(std::size_t row, std::size_t col) const { return cells_[row * n_ + col]; }

 private:
  std::size_t n_;
  std::vector<Color> cells_;
};

// White iff P_{i,j} is in the lower half of the split.
MatrixColoring matrix_from_split(const ColorSplit& split);

struct Entry {
  std::size_t row;
  std::size_t col;
  friend bool operator==(const Entry&, const Entry&) = default;
};

struct SelectionWitness {
  enum class Kind { Rows, Columns };
  Kind kind = Kind::Rows;
  // Selected row (Rows) or column (Columns) indices, 0-based.
  std::vector<std::size_t> indices;
  // Per index: a white entry and a black entry in that row/column.
  std::vector<std::pair<Entry, Entry>> pairs;
};

struct Infeasible {
  std::string reason;
};

using SelectionResult = std::variant<SelectionWitness, Infeasible>;

// Greedy construction: take the lowest bichromatic row, its lowest white and
// lowest black column, drop the row and both columns, repeat. With at least
// floor(cn) rounds the first floor(cn) form a rows witness; otherwise the
// residual monochrome rows are paired white/black over surviving columns.
SelectionResult lemma_matrix_select(const MatrixColoring& m, LemmaConstant c = LemmaConstant::Proven);

bool verify_selection(const SelectionWitness& w, const MatrixColoring& m);

// ------------------------------------------------------------ window lemma

using IndexSet = std::vector<std::size_t>;  // sorted, unique

struct Rational {
  std::int64_t num;
  std::int64_t den;
};

// How each set of a sequence was formed.
struct SetDerivation {
  enum class Kind { Empty, Singleton, Union };
  Kind kind = Kind::Empty;
  std::size_t left = 0;
  std::size_t right = 0;
};

class PreconditionError : public std::invalid_argument {
 public:
  static constexpr std::size_t kWhole = static_cast<std::size_t>(-1);
  PreconditionError(std::size_t index, const std::string& what);
  // Offending set index, or kWhole for a violation not tied to one set.
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

// Smallest j < last with a|R| <= |sets[j] ∩ R| < 2a|R|. Checks that the last
// set is C, that R ⊆ C with |R| >= 2, that 1/|R| < a <= 1/2, and that every
// set is empty, a singleton of C, or the union of two distinct earlier sets
// (using `derivations` when given, otherwise searching).
std::size_t find_window(std::span<const IndexSet> sets, const IndexSet& universe, const IndexSet& r, Rational a,
                        std::span<const SetDerivation> derivations = {});

// Window over Cls(B_i) ∩ R with a = 1/4 on a join-only trace; |R| > 4.
std::size_t rows_window(const RefutationResult& trace, const IndexSet& r);

// Columns j with a clause ¬P_aj ∨ ¬P_bj in Cls(B_i) where one variable is in
// the lower half of the split and the other in the upper half. 1-based.
IndexSet compute_J(const TraceRecord& step, const CnfFormula& f, const PigeonMap& map, const ColorSplit& split);

// Window over J_i ∩ P' with a = 1/4; requires |P'| > 4 and P' ⊆ J of the
// final step.
std::size_t columns_window(const RefutationResult& trace, const CnfFormula& f, const PigeonMap& map,
                           const ColorSplit& split, const IndexSet& columns);

// ------------------------------------------------------ fooling certificate

struct FoolingCertificate {
  std::size_t k = 0;           // prefix length in the order
  std::vector<std::size_t> a;  // 1-based positions within the prefix
  std::vector<bool> z;         // anchor, length k

  std::string to_json() const;
  static FoolingCertificate from_json(std::string_view text);
};

struct FoolingVerdict {
  bool certified = false;
  // 2^|A| when certified. Size counts internal nodes only, so when |A| = 1
  // and both cofactors are constants the bound drops to 1.
  BigInt bound = 0;
  std::size_t actual_size = 0;
  // Two prefixes agreeing with z outside A and inducing the same subfunction.
  std::optional<std::pair<std::vector<bool>, std::vector<bool>>> counterexample;

  std::string to_json(const FoolingCertificate& cert) const;
};

struct FoolingLimits {
  std::size_t max_free_bits = 20;
};

// Certified iff all 2^|A| prefixes lead to pairwise distinct subfunctions,
// i.e. every pair is separated by some suffix. The store's order defines the
// prefix. Throws std::logic_error if a certified bound exceeds the size.
FoolingVerdict check_fooling(NodeStore& store, NodeRef f, const FoolingCertificate& cert,
                             const FoolingLimits& limits = {});
FoolingVerdict check_fooling(const CnfFormula& f, const VarOrderSpec& order, const FoolingCertificate& cert,
                             const FoolingLimits& limits = {});

}  // namespace obddproof::bounds
