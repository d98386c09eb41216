#include "obddproof/refutation.hpp"

#include <algorithm>
#include <atomic>
#include <list>
#include <map>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace obddproof {

using ojson = nlohmann::ordered_json;

std::string_view to_string(StepKind kind) {
  switch (kind) {
    case StepKind::Axiom:
      return "axiom";
    case StepKind::Join:
      return "join";
    case StepKind::Project:
      return "project";
  }
  return "?";
}

std::string_view to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::Linear:
      return "linear";
    case ScheduleKind::BalancedTree:
      return "balanced_tree";
    case ScheduleKind::Gz2003:
      return "gz2003";
    case ScheduleKind::Random:
      return "random";
    case ScheduleKind::GreedyMinSize:
      return "greedy_min_size";
    case ScheduleKind::BucketProjection:
      return "bucket_projection";
  }
  return "?";
}

ScheduleKind parse_schedule_kind(std::string_view name) {
  for (auto k : {ScheduleKind::Linear, ScheduleKind::BalancedTree, ScheduleKind::Gz2003, ScheduleKind::Random,
                 ScheduleKind::GreedyMinSize, ScheduleKind::BucketProjection}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown schedule kind '" + std::string(name) + "'");
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::Malformed:
      return "malformed";
    case ViolationKind::ClauseSet:
      return "clause-set";
    case ViolationKind::Semantic:
      return "semantic";
    case ViolationKind::Size:
      return "size";
    case ViolationKind::CumulativeSize:
      return "cumulative-size";
    case ViolationKind::Terminal:
      return "terminal";
    case ViolationKind::Accounting:
      return "accounting";
  }
  return "?";
}

std::string ScheduleSpec::label() const { return std::string(to_string(kind)); }

ScheduleError::ScheduleError(std::size_t step, const std::string& what)
    : std::invalid_argument("step " + std::to_string(step) + ": " + what), step_(step) {}

void validate_schedule(const Schedule& s, const CnfFormula& f) {
  if (s.steps.empty()) throw ScheduleError(0, "empty schedule");
  for (std::size_t i = 0; i < s.steps.size(); ++i) {
    const ProofStep& st = s.steps[i];
    switch (st.kind) {
      case StepKind::Axiom:
        if (st.clause >= f.num_clauses()) {
          throw ScheduleError(i, "axiom clause " + std::to_string(st.clause) + " out of range (formula has " +
                                     std::to_string(f.num_clauses()) + " clauses)");
        }
        break;
      case StepKind::Join:
        if (st.left >= i || st.right >= i) throw ScheduleError(i, "join refers to a step that is not earlier");
        if (st.left == st.right) throw ScheduleError(i, "join of a step with itself");
        break;
      case StepKind::Project:
        if (!s.projection_enabled) throw ScheduleError(i, "project step while projection is disabled");
        if (st.source >= i) throw ScheduleError(i, "project refers to a step that is not earlier");
        if (st.var.index >= f.num_vars()) throw ScheduleError(i, "project variable out of range");
        break;
    }
  }
}

// ------------------------------------------------------------ schedule JSON

namespace {

ojson step_to_json(const ProofStep& st) {
  switch (st.kind) {
    case StepKind::Axiom:
      return {{"op", "axiom"}, {"clause", st.clause}};
    case StepKind::Join:
      return {{"op", "join"}, {"left", st.left}, {"right", st.right}};
    case StepKind::Project:
      return {{"op", "project"}, {"source", st.source}, {"var", st.var.index}};
  }
  return {};
}

ProofStep step_from_json(const nlohmann::json& j, std::size_t index) {
  try {
    const auto op = j.at("op").get<std::string>();
    if (op == "axiom") return ProofStep::axiom(j.at("clause").get<std::size_t>());
    if (op == "join") return ProofStep::join(j.at("left").get<std::size_t>(), j.at("right").get<std::size_t>());
    if (op == "project") {
      return ProofStep::project(j.at("source").get<std::size_t>(), VarId(j.at("var").get<std::uint32_t>()));
    }
    throw ScheduleError(index, "unknown op '" + op + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ScheduleError(index, std::string("bad step: ") + e.what());
  }
}

std::vector<std::size_t> merge_sets(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::vector<std::size_t> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<std::size_t> step_clauses(const ProofStep& st, const std::vector<std::vector<std::size_t>>& earlier) {
  switch (st.kind) {
    case StepKind::Axiom:
      return {st.clause};
    case StepKind::Join:
      return merge_sets(earlier[st.left], earlier[st.right]);
    case StepKind::Project:
      return earlier[st.source];
  }
  return {};
}

std::optional<bool> constant_of(NodeRef f) {
  if (f.is_false()) return false;
  if (f.is_true()) return true;
  return std::nullopt;
}

}  // namespace

std::string schedule_to_json(const Schedule& s) {
  ojson arr = ojson::array();
  for (const ProofStep& st : s.steps) arr.push_back(step_to_json(st));
  return arr.dump() + "\n";
}

Schedule schedule_from_json(std::string_view text, bool projection_enabled) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("schedule file: ") + e.what());
  }
  if (!doc.is_array()) throw std::invalid_argument("schedule file: expected a JSON list of steps");
  Schedule s;
  s.projection_enabled = projection_enabled;
  for (std::size_t i = 0; i < doc.size(); ++i) s.steps.push_back(step_from_json(doc[i], i));
  return s;
}

// ------------------------------------------------------------- run_schedule

RefutationResult run_schedule(const CnfFormula& f, const VarOrderSpec& order, const Schedule& s,
                              const RunLimits& limits) {
  if (order.size() != f.num_vars()) {
    throw std::invalid_argument("variable order covers " + std::to_string(order.size()) + " variables, formula has " +
                                std::to_string(f.num_vars()));
  }
  validate_schedule(s, f);

  RefutationResult r;
  r.store = std::make_shared<NodeStore>(order.order, StoreLimits{limits.node_budget, 0});
  NodeStore& store = *r.store;
  std::vector<std::vector<std::size_t>> clause_sets;
  std::uint64_t cum = 0;

  for (std::size_t i = 0; i < s.steps.size(); ++i) {
    if (i >= limits.step_limit) {
      r.truncated = true;
      break;
    }
    const ProofStep& st = s.steps[i];
    NodeRef bdd;
    try {
      switch (st.kind) {
        case StepKind::Axiom:
          bdd = clause_to_bdd(f.clause(st.clause), store);
          break;
        case StepKind::Join:
          bdd = store.conjoin(r.step_bdds[st.left], r.step_bdds[st.right]);
          break;
        case StepKind::Project:
          bdd = store.exists(r.step_bdds[st.source], st.var);
          break;
      }
    } catch (const NodeBudgetExceeded&) {
      r.truncated = true;
      break;
    }
    r.step_bdds.push_back(bdd);
    clause_sets.push_back(step_clauses(st, clause_sets));

    TraceRecord rec;
    rec.step = i;
    rec.op = st;
    rec.clauses = clause_sets.back();
    rec.size = store.size(bdd);
    cum += rec.size;
    rec.cum_size = cum;
    rec.peak_nodes = store.node_count();
    rec.constant = constant_of(bdd);
    r.max_intermediate = std::max(r.max_intermediate, rec.size);
    r.trace.push_back(std::move(rec));
  }
  r.total_size = cum;
  r.final = r.step_bdds.empty() ? NodeRef::True() : r.step_bdds.back();
  r.refuted = !r.truncated && r.final.is_false();
  return r;
}

// -------------------------------------------------------- builtin schedules

namespace {

// Joins items left to right and returns the step holding the conjunction.
std::size_t fold(std::vector<ProofStep>& steps, const std::vector<std::size_t>& items) {
  std::size_t acc = items.front();
  for (std::size_t k = 1; k < items.size(); ++k) {
    steps.push_back(ProofStep::join(acc, items[k]));
    acc = steps.size() - 1;
  }
  return acc;
}

std::vector<std::size_t> emit_axioms(std::vector<ProofStep>& steps, const std::vector<std::size_t>& clauses) {
  std::vector<std::size_t> out;
  for (auto c : clauses) {
    steps.push_back(ProofStep::axiom(c));
    out.push_back(steps.size() - 1);
  }
  return out;
}

std::vector<std::size_t> iota_n(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

Schedule greedy_min_size(const CnfFormula& f, const VarOrderSpec& order, const RunLimits& limits) {
  Schedule s;
  NodeStore store(order.order, StoreLimits{limits.node_budget, 0});
  std::vector<NodeRef> bdds;
  std::vector<std::size_t> live = emit_axioms(s.steps, iota_n(f.num_clauses()));
  for (std::size_t c = 0; c < f.num_clauses(); ++c) bdds.push_back(clause_to_bdd(f.clause(c), store));

  // Candidate sizes stay valid while both operands are live.
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> candidate;
  while (live.size() > 1) {
    std::optional<std::pair<std::size_t, std::size_t>> best;
    std::size_t best_size = 0;
    for (std::size_t x = 0; x < live.size(); ++x) {
      for (std::size_t y = x + 1; y < live.size(); ++y) {
        const auto key = std::make_pair(live[x], live[y]);
        auto it = candidate.find(key);
        if (it == candidate.end()) {
          it = candidate.emplace(key, store.size(store.conjoin(bdds[key.first], bdds[key.second]))).first;
        }
        // Pairs are visited in lexicographic order, so strict < keeps the
        // smallest index pair among equal sizes.
        if (!best || it->second < best_size) {
          best = key;
          best_size = it->second;
        }
      }
    }
    s.steps.push_back(ProofStep::join(best->first, best->second));
    const std::size_t joined = s.steps.size() - 1;
    bdds.push_back(store.conjoin(bdds[best->first], bdds[best->second]));
    std::erase(live, best->first);
    std::erase(live, best->second);
    std::erase_if(candidate, [&](const auto& kv) {
      return kv.first.first == best->first || kv.first.first == best->second || kv.first.second == best->first ||
             kv.first.second == best->second;
    });
    live.push_back(joined);
  }
  return s;
}

Schedule bucket_projection(const CnfFormula& f, const VarOrderSpec& order) {
  Schedule s;
  s.projection_enabled = true;
  const std::size_t nv = f.num_vars();

  std::vector<std::vector<std::size_t>> occurs(nv);
  for (std::size_t c = 0; c < f.num_clauses(); ++c) {
    for (const Literal& l : f.clause(c).literals()) occurs[l.var.index].push_back(c);
  }

  struct Item {
    std::size_t step;
    std::vector<bool> support;
  };
  std::list<Item> active;
  std::vector<bool> placed(f.num_clauses(), false);

  auto clause_support = [&](std::size_t c) {
    std::vector<bool> sup(nv, false);
    for (const Literal& l : f.clause(c).literals()) sup[l.var.index] = true;
    return sup;
  };

  for (std::size_t pos = nv; pos-- > 0;) {
    const VarId v = order.order.at(static_cast<std::uint32_t>(pos));
    std::vector<std::size_t> items;
    std::vector<bool> support(nv, false);
    auto absorb = [&](const std::vector<bool>& sup) {
      for (std::size_t k = 0; k < nv; ++k) support[k] = support[k] || sup[k];
    };
    for (auto it = active.begin(); it != active.end();) {
      if (it->support[v.index]) {
        items.push_back(it->step);
        absorb(it->support);
        it = active.erase(it);
      } else {
        ++it;
      }
    }
    for (std::size_t c : occurs[v.index]) {
      if (placed[c]) continue;
      placed[c] = true;
      s.steps.push_back(ProofStep::axiom(c));
      items.push_back(s.steps.size() - 1);
      absorb(clause_support(c));
    }
    if (items.empty()) continue;
    const std::size_t joined = fold(s.steps, items);
    s.steps.push_back(ProofStep::project(joined, v));
    support[v.index] = false;
    active.push_back({s.steps.size() - 1, std::move(support)});
  }

  std::vector<std::size_t> rest;
  for (const Item& it : active) rest.push_back(it.step);
  for (std::size_t c = 0; c < f.num_clauses(); ++c) {
    if (!placed[c]) {
      s.steps.push_back(ProofStep::axiom(c));
      rest.push_back(s.steps.size() - 1);
    }
  }
  if (rest.size() > 1) fold(s.steps, rest);
  return s;
}

}  // namespace

Schedule builtin_schedule(const CnfFormula& f, ScheduleKind kind, const VarOrderSpec& order,
                          const ScheduleOptions& options) {
  if (f.num_clauses() == 0) throw std::invalid_argument("cannot schedule a formula without clauses");
  if (order.size() != f.num_vars()) throw std::invalid_argument("variable order does not match the formula");

  Schedule s;
  s.projection_enabled = options.projection_enabled;
  const std::size_t m = f.num_clauses();
  switch (kind) {
    case ScheduleKind::Linear: {
      fold(s.steps, emit_axioms(s.steps, iota_n(m)));
      break;
    }
    case ScheduleKind::BalancedTree: {
      std::vector<std::size_t> layer = emit_axioms(s.steps, iota_n(m));
      while (layer.size() > 1) {
        std::vector<std::size_t> next;
        for (std::size_t k = 0; k + 1 < layer.size(); k += 2) {
          s.steps.push_back(ProofStep::join(layer[k], layer[k + 1]));
          next.push_back(s.steps.size() - 1);
        }
        if (layer.size() % 2 == 1) next.push_back(layer.back());
        layer = std::move(next);
      }
      break;
    }
    case ScheduleKind::Gz2003: {
      const auto axioms = emit_axioms(s.steps, iota_n(m));
      std::vector<std::size_t> pos;
      std::vector<std::size_t> neg;
      for (std::size_t c = 0; c < m; ++c) (f.clause(c).is_positive() ? pos : neg).push_back(axioms[c]);
      std::vector<std::size_t> parts;
      if (!pos.empty()) parts.push_back(fold(s.steps, pos));
      if (!neg.empty()) parts.push_back(fold(s.steps, neg));
      fold(s.steps, parts);
      break;
    }
    case ScheduleKind::Random: {
      if (!options.seed) throw std::invalid_argument("random schedule needs a seed");
      auto perm = iota_n(m);
      SeededRng rng(*options.seed);
      rng.shuffle(perm);
      fold(s.steps, emit_axioms(s.steps, perm));
      break;
    }
    case ScheduleKind::GreedyMinSize: {
      s.steps = greedy_min_size(f, order, options.limits).steps;
      break;
    }
    case ScheduleKind::BucketProjection: {
      if (!options.projection_enabled) throw std::invalid_argument("bucket_projection requires projection to be enabled");
      s = bucket_projection(f, order);
      break;
    }
  }
  return s;
}

// ------------------------------------------------------ verify_refutation

VerifyReport verify_refutation(const CnfFormula& f, const VarOrderSpec& order, const RefutationResult& r,
                               const VerifyOptions& options) {
  VerifyReport report;
  auto flag = [&](std::size_t step, ViolationKind kind, std::string msg) {
    report.violations.push_back({step, kind, std::move(msg)});
  };

  if (r.trace.empty()) {
    flag(0, ViolationKind::Malformed, "empty trace");
    return report;
  }
  Schedule s;
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    if (r.trace[i].step != i) {
      flag(i, ViolationKind::Malformed, "record numbered " + std::to_string(r.trace[i].step));
      return report;
    }
    s.steps.push_back(r.trace[i].op);
    s.projection_enabled = s.projection_enabled || r.trace[i].op.kind == StepKind::Project;
  }
  try {
    validate_schedule(s, f);
  } catch (const ScheduleError& e) {
    flag(e.step(), ViolationKind::Malformed, e.what());
    return report;
  }
  if (order.size() != f.num_vars()) {
    flag(0, ViolationKind::Malformed, "variable order does not match the formula");
    return report;
  }

  NodeStore fresh(order.order);
  std::vector<NodeRef> expected;
  std::vector<std::vector<std::size_t>> clause_sets;
  std::uint64_t cum = 0;
  std::uint64_t total = 0;
  std::size_t max_size = 0;
  const bool have_bdds = r.store && r.step_bdds.size() == r.trace.size();

  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    const TraceRecord& rec = r.trace[i];
    const ProofStep& st = rec.op;
    NodeRef bdd;
    switch (st.kind) {
      case StepKind::Axiom:
        bdd = clause_to_bdd(f.clause(st.clause), fresh);
        break;
      case StepKind::Join: {
        const BoolOp op = options.fault_join_as_or == i ? BoolOp::Or : BoolOp::And;
        bdd = fresh.apply(op, expected[st.left], expected[st.right]);
        break;
      }
      case StepKind::Project:
        bdd = fresh.exists(expected[st.source], st.var);
        break;
    }
    expected.push_back(bdd);
    clause_sets.push_back(step_clauses(st, clause_sets));

    if (rec.clauses != clause_sets.back()) {
      flag(i, ViolationKind::ClauseSet, "recorded clause set differs from the operands' union");
    }
    if (have_bdds && fresh.import(*r.store, r.step_bdds[i]) != bdd) {
      flag(i, ViolationKind::Semantic, std::string("OBDD is not the expected ") + std::string(to_string(st.kind)) +
                                           " result");
    }
    const std::size_t sz = fresh.size(bdd);
    if (rec.size != sz) {
      flag(i, ViolationKind::Size, "recorded size " + std::to_string(rec.size) + ", recomputed " + std::to_string(sz));
    }
    cum += rec.size;
    if (rec.cum_size != cum) {
      flag(i, ViolationKind::CumulativeSize,
           "recorded cumulative size " + std::to_string(rec.cum_size) + ", expected " + std::to_string(cum));
    }
    if (rec.constant != constant_of(bdd)) flag(i, ViolationKind::Terminal, "recorded terminal status is wrong");
    total += rec.size;
    max_size = std::max(max_size, rec.size);
  }

  const std::size_t last = r.trace.size() - 1;
  if (r.total_size != total) flag(last, ViolationKind::Accounting, "total_size is not the sum of step sizes");
  if (r.max_intermediate != max_size) flag(last, ViolationKind::Accounting, "max_intermediate is not the maximum");
  if (r.refuted && !expected.back().is_false()) {
    flag(last, ViolationKind::Terminal, "claims a refutation but the final OBDD is not FALSE");
  }
  if (r.refuted && r.truncated) flag(last, ViolationKind::Accounting, "truncated run cannot be a refutation");
  return report;
}

// ------------------------------------------------------------- trace files

std::string trace_to_jsonl(const RefutationResult& r) {
  std::string out;
  for (const TraceRecord& rec : r.trace) {
    ojson j = ojson::object();
    j["step"] = rec.step;
    j["kind"] = to_string(rec.op.kind);
    switch (rec.op.kind) {
      case StepKind::Axiom:
        j["clause"] = rec.op.clause;
        break;
      case StepKind::Join:
        j["left"] = rec.op.left;
        j["right"] = rec.op.right;
        break;
      case StepKind::Project:
        j["source"] = rec.op.source;
        j["var"] = rec.op.var.index;
        break;
    }
    j["clauses"] = rec.clauses;
    j["size"] = rec.size;
    j["cum_size"] = rec.cum_size;
    j["peak_nodes"] = rec.peak_nodes;
    j["terminal"] = rec.constant ? ojson(*rec.constant) : ojson(nullptr);
    out += j.dump();
    out += '\n';
  }
  return out;
}

RefutationResult trace_from_jsonl(std::string_view text) {
  RefutationResult r;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      TraceRecord rec;
      rec.step = j.at("step").get<std::size_t>();
      nlohmann::json op = j;
      op["op"] = j.at("kind");
      rec.op = step_from_json(op, rec.step);
      rec.clauses = j.at("clauses").get<std::vector<std::size_t>>();
      rec.size = j.at("size").get<std::size_t>();
      rec.cum_size = j.at("cum_size").get<std::uint64_t>();
      rec.peak_nodes = j.value("peak_nodes", std::size_t{0});
      if (j.contains("terminal") && !j["terminal"].is_null()) rec.constant = j["terminal"].get<bool>();
      r.max_intermediate = std::max(r.max_intermediate, rec.size);
      r.total_size += rec.size;
      r.trace.push_back(std::move(rec));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(line_no, std::string("trace record: ") + e.what());
    }
  }
  r.refuted = !r.trace.empty() && r.trace.back().constant == false;
  r.final = r.refuted ? NodeRef::False() : NodeRef::True();
  return r;
}

std::string trace_to_csv(const RefutationResult& r) {
  std::ostringstream out;
  out << "step,kind,size,cum_size,clauses\n";
  for (const TraceRecord& rec : r.trace) {
    out << rec.step << ',' << to_string(rec.op.kind) << ',' << rec.size << ',' << rec.cum_size << ',';
    for (std::size_t k = 0; k < rec.clauses.size(); ++k) out << (k ? " " : "") << rec.clauses[k];
    out << '\n';
  }
  return out.str();
}

// -------------------------------------------------------------------- sweep

std::vector<SweepRow> sweep(const CnfFormula& f, std::span<const VarOrderSpec> orders,
                            std::span<const ScheduleSpec> schedules, const SweepOptions& options) {
  if (orders.empty() || schedules.empty()) throw std::invalid_argument("sweep needs at least one order and schedule");
  std::vector<SweepRow> rows(orders.size() * schedules.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t t = next++; t < rows.size(); t = next++) {
      SweepRow& row = rows[t];
      row.order_index = t / schedules.size();
      row.schedule_index = t % schedules.size();
      const VarOrderSpec& order = orders[row.order_index];
      const ScheduleSpec& spec = schedules[row.schedule_index];
      row.order_label = order.label();
      row.schedule_label = spec.label();
      row.seed = spec.seed;
      try {
        ScheduleOptions so{spec.seed, spec.kind == ScheduleKind::BucketProjection, options.limits};
        const Schedule s = builtin_schedule(f, spec.kind, order, so);
        const RefutationResult r = run_schedule(f, order, s, options.limits);
        row.refuted = r.refuted;
        row.truncated = r.truncated;
        row.max_intermediate = r.max_intermediate;
        row.total_size = r.total_size;
        row.steps = r.trace.size();
        if (r.truncated) row.error = "budget exceeded";
      } catch (const NodeBudgetExceeded& e) {
        row.truncated = true;
        row.error = e.what();
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };

  const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(rows.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < jobs; ++k) pool.emplace_back(worker);
  }
  return rows;
}

}  // namespace obddproof
