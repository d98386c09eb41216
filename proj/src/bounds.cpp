#include "obddproof/bounds.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

namespace obddproof::bounds {

using ojson = nlohmann::ordered_json;

// ---------------------------------------------------------------- constants

double constant_value(LemmaConstant c) {
  return c == LemmaConstant::Proven ? 0.5 - std::sqrt(2.0) / 4.0 : 1.0 - std::sqrt(2.0) / 2.0;
}

namespace {

// Smallest s with s*s >= x.
std::uint64_t ceil_sqrt(std::uint64_t x) {
  if (x == 0) return 0;
  auto s = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(x)));
  while (s * s < x) ++s;
  while (s > 0 && (s - 1) * (s - 1) >= x) --s;
  return s;
}

}  // namespace

std::size_t floor_cn(std::size_t n, LemmaConstant c) {
  if (n == 0) return 0;
  if (n > (std::size_t{1} << 31)) throw std::invalid_argument("floor_cn: n too large");
  // n*sqrt(2) is irrational, so it lies strictly between s-1 and s.
  const std::uint64_t s = ceil_sqrt(2 * static_cast<std::uint64_t>(n) * n);
  const std::uint64_t twice_n = 2 * static_cast<std::uint64_t>(n);
  if (twice_n < s) return 0;
  // Proven: 4m <= 2n - s.  Conjectured: 2m <= 2n - s.
  return static_cast<std::size_t>((twice_n - s) / (c == LemmaConstant::Proven ? 4 : 2));
}

double theoretical_bound(std::size_t n, LemmaConstant c) {
  return std::pow(2.0, static_cast<double>(n) * constant_value(c) / 4.0);
}

double bound_base(LemmaConstant c) { return std::pow(2.0, constant_value(c) / 4.0); }

bool base_exceeds_1025_certified() {
  // c > 1/7  <=>  sqrt(2) < 10/7  <=>  2 * 49 < 100.
  const bool c_above_one_seventh = 2 * 49 < 100;
  // 2^(1/28) > 41/40  <=>  2 * 40^28 > 41^28.
  const BigInt lhs = 2 * boost::multiprecision::pow(BigInt(40), 28);
  const BigInt rhs = boost::multiprecision::pow(BigInt(41), 28);
  // 2^(c/4) > 2^(1/28) > 1.025.
  return c_above_one_seventh && lhs > rhs;
}

// --------------------------------------------------------------- ColorSplit

bool ColorSplit::is_below(VarId v) const { return v.index < below_mask.size() && below_mask[v.index]; }
bool ColorSplit::is_above(VarId v) const { return v.index < above_mask.size() && above_mask[v.index]; }
bool ColorSplit::is_below_star(VarId v) const {
  return v.index < below_star_mask.size() && below_star_mask[v.index];
}

ColorSplit color_split(const VarOrderSpec& order, std::size_t n) {
  if (n == 0) throw std::invalid_argument("color_split: n must be positive");
  const std::size_t total = n * (n + 1);
  if (order.size() != total) {
    throw std::invalid_argument("color_split: order covers " + std::to_string(order.size()) +
                                " variables, PHP_" + std::to_string(n) + " has " + std::to_string(total));
  }
  ColorSplit s;
  s.n = n;
  s.order = order;
  s.below_mask.assign(total, false);
  s.above_mask.assign(total, false);
  s.below_star_mask.assign(total, false);

  const std::size_t half = n * n / 2;
  std::optional<std::uint32_t> max_below_pos;
  for (std::uint32_t pos = 0; pos < total; ++pos) {
    const VarId v = order.order.at(pos);
    if (v.index >= n * n) continue;  // pigeon n+1 is outside PC*
    if (s.below.size() < half) {
      s.below.push_back(v);
      s.below_mask[v.index] = true;
      max_below_pos = pos;
    } else {
      s.above.push_back(v);
      s.above_mask[v.index] = true;
    }
  }
  for (std::uint32_t pos = 0; pos < total; ++pos) {
    const VarId v = order.order.at(pos);
    if (max_below_pos && pos <= *max_below_pos) {
      s.below_star.push_back(v);
      s.below_star_mask[v.index] = true;
    } else {
      s.above_star.push_back(v);
    }
  }
  return s;
}

// ----------------------------------------------------------- MatrixColoring

MatrixColoring::MatrixColoring(std::size_t n, std::vector<Color> cells) : n_(n), cells_(std::move(cells)) {
  if (cells_.size() != n * n) throw std::invalid_argument("matrix coloring: expected n*n cells");
  const auto white = static_cast<long long>(std::count(cells_.begin(), cells_.end(), Color::White));
  const auto black = static_cast<long long>(cells_.size()) - white;
  if (white - black > 1 || black - white > 1) {
    throw std::invalid_argument("matrix coloring is unbalanced: " + std::to_string(white) + " white vs " +
                                std::to_string(black) + " black");
  }
}

MatrixColoring MatrixColoring::parse(std::string_view text) {
  std::vector<std::string> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    std::string row;
    for (char ch : line) {
      if (ch == '#') break;
      if (std::isspace(static_cast<unsigned char>(ch))) continue;
      const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
      if (up != 'W' && up != 'B') throw std::invalid_argument(std::string("matrix coloring: bad cell '") + ch + "'");
      row.push_back(up);
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  const std::size_t n = rows.size();
  std::vector<Color> cells;
  for (const auto& row : rows) {
    if (row.size() != n) throw std::invalid_argument("matrix coloring: rows must have n cells for n rows");
    for (char ch : row) cells.push_back(ch == 'W' ? Color::White : Color::Black);
  }
  return MatrixColoring(n, std::move(cells));
}

std::string MatrixColoring::to_string() const {
  std::string out;
  for (std::size_t r = 0; r < n_; ++r) {
    for (std::size_t c = 0; c < n_; ++c) out += at(r, c) == Color::White ? 'W' : 'B';
    out += '\n';
  }
  return out;
}

MatrixColoring matrix_from_split(const ColorSplit& split) {
  const std::size_t n = split.n;
  PigeonMap map(static_cast<int>(n));
  std::vector<Color> cells(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const VarId v = map.var(static_cast<int>(i + 1), static_cast<int>(j + 1));
      cells[i * n + j] = split.is_below(v) ? Color::White : Color::Black;
    }
  }
  return MatrixColoring(n, std::move(cells));
}

// ------------------------------------------------------ lemma_matrix_select

SelectionResult lemma_matrix_select(const MatrixColoring& m, LemmaConstant c) {
  const std::size_t n = m.n();
  const std::size_t target = floor_cn(n, c);
  if (target == 0) return Infeasible{"floor(c n)=0"};

  std::vector<bool> row_alive(n, true);
  std::vector<bool> col_alive(n, true);
  SelectionWitness rows_witness;
  rows_witness.kind = SelectionWitness::Kind::Rows;

  for (;;) {
    bool progressed = false;
    for (std::size_t r = 0; r < n && !progressed; ++r) {
      if (!row_alive[r]) continue;
      std::optional<std::size_t> white;
      std::optional<std::size_t> black;
      for (std::size_t col = 0; col < n; ++col) {
        if (!col_alive[col]) continue;
        if (m.at(r, col) == Color::White && !white) white = col;
        if (m.at(r, col) == Color::Black && !black) black = col;
      }
      if (white && black) {
        rows_witness.indices.push_back(r);
        rows_witness.pairs.push_back({Entry{r, *white}, Entry{r, *black}});
        row_alive[r] = false;
        col_alive[*white] = false;
        col_alive[*black] = false;
        progressed = true;
      }
    }
    if (!progressed) break;
  }

  if (rows_witness.indices.size() >= target) {
    rows_witness.indices.resize(target);
    rows_witness.pairs.resize(target);
    return rows_witness;
  }

  // Every surviving row is monochrome over the surviving columns.
  std::vector<std::size_t> white_rows;
  std::vector<std::size_t> black_rows;
  std::vector<std::size_t> cols;
  for (std::size_t col = 0; col < n; ++col) {
    if (col_alive[col]) cols.push_back(col);
  }
  if (cols.empty()) return Infeasible{"no surviving columns"};
  for (std::size_t r = 0; r < n; ++r) {
    if (!row_alive[r]) continue;
    (m.at(r, cols.front()) == Color::White ? white_rows : black_rows).push_back(r);
  }
  if (white_rows.size() < target || black_rows.size() < target || cols.size() < target) {
    return Infeasible{"residual matrix has " + std::to_string(white_rows.size()) + " white rows, " +
                      std::to_string(black_rows.size()) + " black rows and " + std::to_string(cols.size()) +
                      " columns; need " + std::to_string(target) + " of each"};
  }
  SelectionWitness w;
  w.kind = SelectionWitness::Kind::Columns;
  for (std::size_t i = 0; i < target; ++i) {
    w.indices.push_back(cols[i]);
    w.pairs.push_back({Entry{white_rows[i], cols[i]}, Entry{black_rows[i], cols[i]}});
  }
  return w;
}

bool verify_selection(const SelectionWitness& w, const MatrixColoring& m) {
  const std::size_t n = m.n();
  if (w.indices.size() != w.pairs.size()) return false;
  const bool by_rows = w.kind == SelectionWitness::Kind::Rows;
  std::vector<bool> index_used(n, false);
  // Rows witness: all entries in distinct columns. Columns witness: distinct rows.
  std::vector<bool> other_used(n, false);
  for (std::size_t i = 0; i < w.indices.size(); ++i) {
    const std::size_t idx = w.indices[i];
    if (idx >= n || index_used[idx]) return false;
    index_used[idx] = true;
    const auto& [white, black] = w.pairs[i];
    for (const Entry& e : {white, black}) {
      if (e.row >= n || e.col >= n) return false;
      if ((by_rows ? e.row : e.col) != idx) return false;
      const std::size_t other = by_rows ? e.col : e.row;
      if (other_used[other]) return false;
      other_used[other] = true;
    }
    if (m.at(white.row, white.col) != Color::White || m.at(black.row, black.col) != Color::Black) return false;
  }
  return true;
}

// ------------------------------------------------------------ window lemma

PreconditionError::PreconditionError(std::size_t index, const std::string& what)
    : std::invalid_argument(index == kWhole ? what : "set " + std::to_string(index) + ": " + what), index_(index) {}

namespace {

std::size_t intersection_size(const IndexSet& a, const IndexSet& b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

IndexSet set_union(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

IndexSet set_intersection(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool is_sorted_unique(const IndexSet& s) { return std::adjacent_find(s.begin(), s.end(), std::greater_equal<>()) == s.end(); }

}  // namespace

std::size_t find_window(std::span<const IndexSet> sets, const IndexSet& universe, const IndexSet& r, Rational a,
                        std::span<const SetDerivation> derivations) {
  using E = PreconditionError;
  if (sets.empty()) throw E(E::kWhole, "empty sequence");
  if (a.den <= 0 || a.num <= 0) throw E(E::kWhole, "a must be a positive rational");
  const auto rs = static_cast<std::int64_t>(r.size());
  if (rs < 2) throw E(E::kWhole, "|R| must be at least 2");
  // 1/|R| <= a <= 1/2; at a = 1/|R| the window is [1, 2) and a singleton of R qualifies.
  if (a.den > a.num * rs) throw E(E::kWhole, "a must be at least 1/|R|");
  if (2 * a.num > a.den) throw E(E::kWhole, "a must be at most 1/2");
  if (!is_sorted_unique(universe) || !is_sorted_unique(r)) throw E(E::kWhole, "sets must be sorted and unique");
  if (intersection_size(r, universe) != r.size()) throw E(E::kWhole, "R is not a subset of C");
  if (sets.back() != universe) throw E(sets.size() - 1, "last set is not C");
  if (!derivations.empty() && derivations.size() != sets.size()) throw E(E::kWhole, "one derivation per set required");

  for (std::size_t i = 0; i < sets.size(); ++i) {
    const IndexSet& s = sets[i];
    if (!is_sorted_unique(s)) throw E(i, "set is not sorted and unique");
    if (!derivations.empty()) {
      const SetDerivation& d = derivations[i];
      switch (d.kind) {
        case SetDerivation::Kind::Empty:
          if (!s.empty()) throw E(i, "declared empty but is not");
          break;
        case SetDerivation::Kind::Singleton:
          if (s.size() != 1 || !std::binary_search(universe.begin(), universe.end(), s.front())) {
            throw E(i, "declared a singleton of C but is not");
          }
          break;
        case SetDerivation::Kind::Union:
          if (d.left >= i || d.right >= i || d.left == d.right) throw E(i, "union must use two distinct earlier sets");
          if (set_union(sets[d.left], sets[d.right]) != s) throw E(i, "not the union of its declared operands");
          break;
      }
      continue;
    }
    if (s.empty()) continue;
    if (s.size() == 1 && std::binary_search(universe.begin(), universe.end(), s.front())) continue;
    // Only earlier subsets of s can take part; try the largest first.
    std::vector<std::size_t> subs;
    for (std::size_t j = 0; j < i; ++j) {
      if (intersection_size(sets[j], s) == sets[j].size()) subs.push_back(j);
    }
    std::stable_sort(subs.begin(), subs.end(),
                     [&](std::size_t x, std::size_t y) { return sets[x].size() > sets[y].size(); });
    bool found = false;
    for (std::size_t x = 0; x < subs.size() && !found; ++x) {
      const std::size_t missing = s.size() - sets[subs[x]].size();
      for (std::size_t y = 0; y < subs.size() && !found; ++y) {
        if (sets[subs[y]].size() < missing) break;
        found = y != x && intersection_size(sets[subs[x]], sets[subs[y]]) + missing == sets[subs[y]].size();
      }
    }
    if (!found) throw E(i, "neither empty, a singleton of C, nor a union of two earlier sets");
  }

  for (std::size_t j = 0; j + 1 < sets.size(); ++j) {
    const auto hit = static_cast<std::int64_t>(intersection_size(sets[j], r));
    // a|R| <= hit < 2a|R|
    if (a.num * rs <= hit * a.den && hit * a.den < 2 * a.num * rs) return j;
  }
  throw std::logic_error("find_window: no index in the window although all preconditions hold");
}

std::size_t rows_window(const RefutationResult& trace, const IndexSet& r) {
  using E = PreconditionError;
  if (r.size() <= 4) throw E(E::kWhole, "|R| must exceed 4");
  std::vector<IndexSet> sets;
  std::vector<SetDerivation> derivs;
  for (const TraceRecord& rec : trace.trace) {
    sets.push_back(set_intersection(rec.clauses, r));
    switch (rec.op.kind) {
      case StepKind::Axiom:
        derivs.push_back({sets.back().empty() ? SetDerivation::Kind::Empty : SetDerivation::Kind::Singleton, 0, 0});
        break;
      case StepKind::Join:
        derivs.push_back({SetDerivation::Kind::Union, rec.op.left, rec.op.right});
        break;
      case StepKind::Project:
        throw E(rec.step, "rows_window needs a join-only trace");
    }
  }
  return find_window(sets, r, r, Rational{1, 4}, derivs);
}

IndexSet compute_J(const TraceRecord& step, const CnfFormula& f, const PigeonMap& map, const ColorSplit& split) {
  IndexSet cols;
  for (std::size_t c : step.clauses) {
    const auto& lits = f.clause(c).literals();
    if (lits.size() != 2 || !lits[0].negative || !lits[1].negative) continue;
    const VarId x = lits[0].var;
    const VarId y = lits[1].var;
    if (map.hole_of(x) != map.hole_of(y)) continue;
    const bool straddles = (split.is_below(x) && split.is_above(y)) || (split.is_below(y) && split.is_above(x));
    if (straddles) cols.push_back(static_cast<std::size_t>(map.hole_of(x)));
  }
  std::sort(cols.begin(), cols.end());
  cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
  return cols;
}

std::size_t columns_window(const RefutationResult& trace, const CnfFormula& f, const PigeonMap& map,
                           const ColorSplit& split, const IndexSet& columns) {
  using E = PreconditionError;
  if (columns.size() <= 4) throw E(E::kWhole, "|P'| must exceed 4");
  std::vector<IndexSet> sets;
  std::vector<SetDerivation> derivs;
  for (const TraceRecord& rec : trace.trace) {
    sets.push_back(set_intersection(compute_J(rec, f, map, split), columns));
    switch (rec.op.kind) {
      case StepKind::Axiom:
        derivs.push_back({sets.back().empty() ? SetDerivation::Kind::Empty : SetDerivation::Kind::Singleton, 0, 0});
        break;
      case StepKind::Join:
        derivs.push_back({SetDerivation::Kind::Union, rec.op.left, rec.op.right});
        break;
      case StepKind::Project:
        throw E(rec.step, "columns_window needs a join-only trace");
    }
  }
  if (!sets.empty() && sets.back() != columns) throw E(sets.size() - 1, "P' is not contained in J of the final step");
  return find_window(sets, columns, columns, Rational{1, 4}, derivs);
}

// ------------------------------------------------------ fooling certificate

std::string FoolingCertificate::to_json() const {
  ojson z_json = ojson::array();
  for (bool b : z) z_json.push_back(b ? 1 : 0);
  return ojson{{"k", k}, {"A", a}, {"z", z_json}}.dump();
}

FoolingCertificate FoolingCertificate::from_json(std::string_view text) {
  FoolingCertificate c;
  try {
    const auto j = nlohmann::json::parse(text);
    c.k = j.at("k").get<std::size_t>();
    c.a = j.at("A").get<std::vector<std::size_t>>();
    if (j.contains("z")) {
      for (const auto& b : j.at("z")) c.z.push_back(b.is_boolean() ? b.get<bool>() : b.get<int>() != 0);
    } else {
      c.z.assign(c.k, false);
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("certificate: ") + e.what());
  }
  return c;
}

std::string FoolingVerdict::to_json(const FoolingCertificate& cert) const {
  ojson j;
  j["certificate"] = ojson::parse(cert.to_json());
  j["verdict"] = certified ? "certified" : "refuted";
  if (certified) j["bound"] = bound.convert_to<std::uint64_t>();
  j["actual_size"] = actual_size;
  if (counterexample) {
    auto bits = [](const std::vector<bool>& v) {
      ojson arr = ojson::array();
      for (bool b : v) arr.push_back(b ? 1 : 0);
      return arr;
    };
    j["counterexample"] = {{"x1", bits(counterexample->first)}, {"x2", bits(counterexample->second)}};
  }
  return j.dump();
}

FoolingVerdict check_fooling(NodeStore& store, NodeRef f, const FoolingCertificate& cert,
                             const FoolingLimits& limits) {
  const std::size_t k = cert.k;
  if (k >= store.num_vars()) throw std::invalid_argument("certificate: k must be smaller than the number of variables");
  if (cert.z.size() != k) throw std::invalid_argument("certificate: z must have k entries");
  if (cert.a.empty()) throw std::invalid_argument("certificate: A must be nonempty");
  std::vector<bool> free(k, false);
  for (std::size_t p : cert.a) {
    if (p < 1 || p > k) throw std::invalid_argument("certificate: positions in A must lie in 1..k");
    if (free[p - 1]) throw std::invalid_argument("certificate: duplicate position in A");
    free[p - 1] = true;
  }
  if (cert.a.size() > limits.max_free_bits) {
    throw std::invalid_argument("certificate: |A| = " + std::to_string(cert.a.size()) + " exceeds the limit of " +
                                std::to_string(limits.max_free_bits));
  }

  // Leaves are reached in lexicographic order of the prefix (0 before 1).
  std::vector<std::pair<std::vector<bool>, NodeRef>> leaves;
  std::vector<bool> prefix(k, false);
  auto descend = [&](auto&& self, std::size_t level, NodeRef g) -> void {
    if (level == k) {
      leaves.emplace_back(prefix, g);
      return;
    }
    const VarId v = store.order().at(static_cast<std::uint32_t>(level));
    if (!free[level]) {
      prefix[level] = cert.z[level];
      self(self, level + 1, store.restrict(g, v, cert.z[level]));
      return;
    }
    for (bool b : {false, true}) {
      prefix[level] = b;
      self(self, level + 1, store.restrict(g, v, b));
    }
  };
  descend(descend, 0, f);

  FoolingVerdict verdict;
  verdict.actual_size = store.size(f);
  std::map<std::uint32_t, std::size_t> first_seen;
  std::optional<std::pair<std::size_t, std::size_t>> clash;
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    auto [it, inserted] = first_seen.emplace(leaves[i].second.id(), i);
    if (!inserted) {
      // Prefer the pair whose first member is earliest, then the earliest partner.
      const std::pair<std::size_t, std::size_t> cand{it->second, i};
      if (!clash || cand < *clash) clash = cand;
    }
  }
  if (clash) {
    verdict.certified = false;
    verdict.counterexample = std::make_pair(leaves[clash->first].first, leaves[clash->second].first);
    return verdict;
  }
  verdict.certified = true;
  verdict.bound = BigInt(1) << cert.a.size();
  // Size counts internal nodes only. With |A| = 1 and both cofactors constant
  // (f restricted to z is a literal) a single node suffices.
  if (cert.a.size() == 1 && leaves[0].second.is_terminal() && leaves[1].second.is_terminal()) verdict.bound = 1;
  if (BigInt(verdict.actual_size) < verdict.bound) {
    throw std::logic_error("certified fooling bound exceeds the OBDD size; the engine is inconsistent");
  }
  return verdict;
}

FoolingVerdict check_fooling(const CnfFormula& f, const VarOrderSpec& order, const FoolingCertificate& cert,
                             const FoolingLimits& limits) {
  if (order.size() != f.num_vars()) throw std::invalid_argument("order does not match the formula");
  NodeStore store(order.order);
  const NodeRef g = formula_to_bdd(f, store);
  return check_fooling(store, g, cert, limits);
}

}  // namespace obddproof::bounds
