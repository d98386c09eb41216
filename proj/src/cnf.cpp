#include "obddproof/cnf.hpp"

#include <algorithm>
#include <charconv>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace obddproof {

Literal Literal::from_dimacs(int lit) {
  if (lit == 0) throw std::invalid_argument("DIMACS literal 0 is the clause terminator");
  const auto mag = static_cast<std::uint32_t>(lit < 0 ? -static_cast<long long>(lit) : lit);
  return Literal{VarId(mag - 1), lit < 0};
}

// ------------------------------------------------------------------ Clause

Clause::Clause(std::vector<Literal> literals) {
  literals_.reserve(literals.size());
  for (const Literal& l : literals) {
    bool duplicate = false;
    for (const Literal& kept : literals_) {
      if (kept.var != l.var) continue;
      if (kept.negative != l.negative) {
        throw std::invalid_argument("tautological clause: variable " + std::to_string(l.var.index + 1) +
                                    " occurs with both signs");
      }
      duplicate = true;
    }
    if (!duplicate) literals_.push_back(l);
  }
}

bool Clause::mentions(VarId v) const {
  return std::any_of(literals_.begin(), literals_.end(), [&](const Literal& l) { return l.var == v; });
}

bool Clause::is_positive() const {
  return std::none_of(literals_.begin(), literals_.end(), [](const Literal& l) { return l.negative; });
}

bool Clause::satisfied_by(std::uint64_t bits) const {
  return std::any_of(literals_.begin(), literals_.end(), [&](const Literal& l) {
    const bool value = (bits >> l.var.index) & 1u;
    return value != l.negative;
  });
}

void CnfFormula::add_clause(Clause c) {
  for (const Literal& l : c.literals()) {
    if (l.var.index >= num_vars_) {
      throw std::invalid_argument("clause mentions variable " + std::to_string(l.var.index + 1) + " but only " +
                                  std::to_string(num_vars_) + " are declared");
    }
  }
  clauses_.push_back(std::move(c));
}

// --------------------------------------------------------------- PigeonMap

PigeonMap::PigeonMap(int holes) : n_(holes) {
  if (holes < 1) throw std::invalid_argument("pigeonhole instance needs n >= 1");
}

VarId PigeonMap::var(int pigeon, int hole) const {
  if (pigeon < 1 || pigeon > n_ + 1 || hole < 1 || hole > n_) {
    throw std::out_of_range("P(" + std::to_string(pigeon) + "," + std::to_string(hole) + ") outside PHP_" +
                            std::to_string(n_));
  }
  return VarId(static_cast<std::uint32_t>((pigeon - 1) * n_ + (hole - 1)));
}

int PigeonMap::pigeon_of(VarId v) const {
  if (v.index >= num_vars()) throw std::out_of_range("variable outside pigeon map");
  return static_cast<int>(v.index) / n_ + 1;
}

int PigeonMap::hole_of(VarId v) const {
  if (v.index >= num_vars()) throw std::out_of_range("variable outside pigeon map");
  return static_cast<int>(v.index) % n_ + 1;
}

std::string PigeonMap::to_json() const {
  nlohmann::json vars = nlohmann::json::array();
  for (int i = 1; i <= n_ + 1; ++i) {
    for (int j = 1; j <= n_; ++j) {
      vars.push_back({{"pigeon", i}, {"hole", j}, {"dimacs", var(i, j).index + 1}});
    }
  }
  nlohmann::json doc = {{"n", n_}, {"vars", vars}};
  return doc.dump(2) + "\n";
}

PigeonMap PigeonMap::from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("pigeon map: ") + e.what());
  }
  if (!doc.contains("n") || !doc["n"].is_number_integer()) throw std::invalid_argument("pigeon map: missing integer \"n\"");
  PigeonMap map(doc["n"].get<int>());
  if (doc.contains("vars")) {
    const auto& vars = doc["vars"];
    if (!vars.is_array() || vars.size() != map.num_vars()) {
      throw std::invalid_argument("pigeon map: \"vars\" must list all n(n+1) variables");
    }
    for (const auto& e : vars) {
      const int i = e.at("pigeon").get<int>();
      const int j = e.at("hole").get<int>();
      const auto d = e.at("dimacs").get<std::uint32_t>();
      if (map.var(i, j).index + 1 != d) {
        throw std::invalid_argument("pigeon map: entry (" + std::to_string(i) + "," + std::to_string(j) +
                                    ") is not row-major numbered");
      }
    }
  }
  return map;
}

// ----------------------------------------------------------------- PHP gen

PhpInstance gen_php(int n) {
  PigeonMap map(n);
  CnfFormula f(map.num_vars(), "PHP_" + std::to_string(n));
  for (int i = 1; i <= n + 1; ++i) {
    std::vector<Literal> row;
    for (int j = 1; j <= n; ++j) row.push_back({map.var(i, j), false});
    f.add_clause(Clause(std::move(row)));
  }
  for (int k = 1; k <= n; ++k) {
    for (int i = 1; i <= n + 1; ++i) {
      for (int j = i + 1; j <= n + 1; ++j) {
        f.add_clause(Clause({{map.var(i, k), true}, {map.var(j, k), true}}));
      }
    }
  }
  return {std::move(f), map};
}

CnfFormula gen_pc_star(int n) {
  PigeonMap map(n);
  CnfFormula f(map.num_vars(), "PC*_" + std::to_string(n));
  for (int i = 1; i <= n; ++i) {
    std::vector<Literal> row;
    for (int j = 1; j <= n; ++j) row.push_back({map.var(i, j), false});
    f.add_clause(Clause(std::move(row)));
  }
  return f;
}

// ------------------------------------------------------------------ DIMACS

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

std::vector<std::string_view> split_words(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <class Int>
bool parse_int(std::string_view word, Int& out) {
  const auto* end = word.data() + word.size();
  auto [ptr, ec] = std::from_chars(word.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

CnfFormula parse_dimacs(std::string_view text) {
  std::size_t line_no = 0;
  std::size_t declared_clauses = 0;
  bool have_header = false;
  CnfFormula f;
  std::string label;
  std::vector<Literal> pending;
  std::size_t pending_line = 0;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    const auto words = split_words(line);
    if (words.empty()) continue;
    if (words[0] == "c" || words[0].front() == 'c') {
      constexpr std::string_view kLabel = "c label: ";
      if (label.empty() && line.starts_with(kLabel)) label = std::string(line.substr(kLabel.size()));
      continue;
    }
    if (words[0] == "%") break;
    if (words[0] == "p") {
      if (have_header) throw ParseError(line_no, "duplicate header");
      std::size_t vars = 0;
      if (words.size() != 4 || words[1] != "cnf" || !parse_int(words[2], vars) ||
          !parse_int(words[3], declared_clauses)) {
        throw ParseError(line_no, "malformed header, expected 'p cnf <vars> <clauses>'");
      }
      f = CnfFormula(vars);
      have_header = true;
      continue;
    }
    if (!have_header) throw ParseError(line_no, "clause before 'p cnf' header");
    for (auto w : words) {
      int lit = 0;
      if (!parse_int(w, lit)) throw ParseError(line_no, "invalid literal '" + std::string(w) + "'");
      if (lit == 0) {
        if (pending.empty()) throw ParseError(line_no, "empty clause");
        try {
          f.add_clause(Clause(std::move(pending)));
        } catch (const std::invalid_argument& e) {
          throw ParseError(pending_line, e.what());
        }
        pending.clear();
        continue;
      }
      const long long mag = lit < 0 ? -static_cast<long long>(lit) : lit;
      if (static_cast<std::size_t>(mag) > f.num_vars()) {
        throw ParseError(line_no, "literal " + std::to_string(lit) + " exceeds declared variable count " +
                                      std::to_string(f.num_vars()));
      }
      if (pending.empty()) pending_line = line_no;
      pending.push_back(Literal::from_dimacs(lit));
    }
  }
  if (!have_header) throw ParseError(line_no, "missing 'p cnf' header");
  if (!pending.empty()) throw ParseError(pending_line, "clause missing terminating 0");
  if (f.num_clauses() != declared_clauses) {
    throw ParseError(line_no, "header declares " + std::to_string(declared_clauses) + " clauses, found " +
                                  std::to_string(f.num_clauses()));
  }
  f.set_label(label);
  return f;
}

std::string write_dimacs(const CnfFormula& f) {
  std::ostringstream out;
  if (!f.label().empty()) out << "c label: " << f.label() << '\n';
  out << "p cnf " << f.num_vars() << ' ' << f.num_clauses() << '\n';
  for (const Clause& c : f.clauses()) {
    for (const Literal& l : c.literals()) out << l.to_dimacs() << ' ';
    out << "0\n";
  }
  return out.str();
}

// ------------------------------------------------------------ clause OBDDs

NodeRef clause_to_bdd(const Clause& c, NodeStore& store) {
  if (c.empty()) {
    std::clog << "warning: empty clause encoded as FALSE\n";
    return NodeRef::False();
  }
  std::vector<Literal> lits = c.literals();
  const VarOrder& order = store.order();
  for (const Literal& l : lits) {
    if (l.var.index >= store.num_vars()) throw std::invalid_argument("clause variable not declared in store");
  }
  std::sort(lits.begin(), lits.end(),
            [&](const Literal& a, const Literal& b) { return order.position(a.var) > order.position(b.var); });
  NodeRef acc = NodeRef::False();
  for (const Literal& l : lits) {
    acc = l.negative ? store.make_node(l.var, NodeRef::True(), acc) : store.make_node(l.var, acc, NodeRef::True());
  }
  return acc;
}

NodeRef formula_to_bdd(const CnfFormula& f, NodeStore& store) {
  NodeRef acc = NodeRef::True();
  for (const Clause& c : f.clauses()) acc = store.conjoin(acc, clause_to_bdd(c, store));
  return acc;
}

}  // namespace obddproof
