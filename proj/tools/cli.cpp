#include "cli.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "obddproof/bdd.hpp"
#include "obddproof/bounds.hpp"
#include "obddproof/cnf.hpp"
#include "obddproof/oracle.hpp"
#include "obddproof/order.hpp"
#include "obddproof/refutation.hpp"

namespace obddproof::cli {
namespace {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

// Bad flags or unusable input; maps to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
  if (!out.flush()) throw UsageError("write failed: " + path);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> items;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) {
    if (!cur.empty()) items.push_back(cur);
  }
  return items;
}

std::uint64_t parse_u64(std::string_view text, const std::string& what) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  auto [p, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || p != end || text.empty()) throw UsageError("bad " + what + ": '" + std::string(text) + "'");
  return v;
}

// Explicit --map, else a "<cnf>.map.json" sidecar next to the formula.
std::optional<PigeonMap> load_map(const std::string& cnf_path, const std::string& map_path) {
  if (!map_path.empty()) return PigeonMap::from_json(read_file(map_path));
  const std::string sidecar = cnf_path + ".map.json";
  if (fs::exists(sidecar)) return PigeonMap::from_json(read_file(sidecar));
  return std::nullopt;
}

RunLimits make_limits(long long node_budget, long long step_limit) {
  if (node_budget <= 0 || step_limit <= 0) throw UsageError("budgets must be positive");
  RunLimits limits;
  limits.node_budget = static_cast<std::size_t>(node_budget);
  limits.step_limit = static_cast<std::size_t>(step_limit);
  return limits;
}

// "kind" or "random:<seed>"; a bare "random" takes the fallback seed.
ScheduleSpec parse_schedule_spec(const std::string& text, std::optional<std::uint64_t> fallback_seed) {
  ScheduleSpec spec;
  const auto colon = text.find(':');
  spec.kind = parse_schedule_kind(text.substr(0, colon));
  if (colon != std::string::npos) {
    if (spec.kind != ScheduleKind::Random) throw UsageError("only random schedules take a seed: " + text);
    spec.seed = parse_u64(std::string_view(text).substr(colon + 1), "schedule seed");
  } else if (spec.kind == ScheduleKind::Random) {
    if (!fallback_seed) throw UsageError("random schedule needs a seed (random:<seed> or --seed)");
    spec.seed = fallback_seed;
  }
  return spec;
}

std::pair<int, int> parse_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) throw UsageError("range must look like a..b");
  const auto lo = parse_u64(std::string_view(text).substr(0, dots), "range start");
  const auto hi = parse_u64(std::string_view(text).substr(dots + 2), "range end");
  if (lo < 1 || hi < lo || hi > 64) throw UsageError("bad range " + text);
  return {static_cast<int>(lo), static_cast<int>(hi)};
}

// --------------------------------------------------------------------- gen

struct GenArgs {
  int n = 0;
  bool pc_star = false;
  std::string out;
};

int cmd_gen(const GenArgs& a, std::ostream& out, std::ostream& err) {
  if (a.n < 1) throw UsageError("--n must be at least 1");
  const PhpInstance php = gen_php(a.n);
  const CnfFormula f = a.pc_star ? gen_pc_star(a.n) : php.formula;
  const std::string text = write_dimacs(f);
  if (a.out.empty()) {
    out << text;
  } else {
    write_file(a.out, text);
    write_file(a.out + ".map.json", php.map.to_json() + "\n");
    err << "wrote " << a.out << " (" << f.num_vars() << " vars, " << f.num_clauses() << " clauses) and "
        << a.out << ".map.json\n";
  }
  return kOk;
}

// ------------------------------------------------------------------ refute

struct RefuteArgs {
  std::string cnf;
  std::string map;
  std::string order = "row-major";
  std::string schedule = "linear";
  std::string schedule_file;
  std::optional<std::uint64_t> seed;
  bool projection = false;
  std::string trace;
  std::string csv;
  std::string emit_schedule;
  bool verify = false;
  long long node_budget = static_cast<long long>(RunLimits{}.node_budget);
  long long step_limit = static_cast<long long>(RunLimits{}.step_limit);
};

int cmd_refute(const RefuteArgs& a, std::ostream& out, std::ostream& err) {
  const CnfFormula f = parse_dimacs(read_file(a.cnf));
  const auto map = load_map(a.cnf, a.map);
  const VarOrderSpec order = parse_order_spec(a.order, f.num_vars(), map);
  const RunLimits limits = make_limits(a.node_budget, a.step_limit);

  Schedule s;
  if (!a.schedule_file.empty()) {
    s = schedule_from_json(read_file(a.schedule_file), a.projection);
  } else {
    const ScheduleSpec spec = parse_schedule_spec(a.schedule, a.seed);
    s = builtin_schedule(f, spec.kind, order, ScheduleOptions{spec.seed, a.projection, limits});
  }
  if (!a.emit_schedule.empty()) write_file(a.emit_schedule, schedule_to_json(s));

  const RefutationResult r = run_schedule(f, order, s, limits);
  if (!a.trace.empty()) write_file(a.trace, trace_to_jsonl(r));
  if (!a.csv.empty()) write_file(a.csv, trace_to_csv(r));

  out << "refuted=" << (r.refuted ? "true" : "false") << " max=" << r.max_intermediate << " total=" << r.total_size
      << " steps=" << r.trace.size() << "\n";
  if (r.truncated) {
    err << "run truncated after " << r.trace.size() << " steps (node budget " << limits.node_budget
        << ", step limit " << limits.step_limit << ")\n";
    return kBudget;
  }
  if (a.verify) {
    const VerifyReport report = verify_refutation(f, order, r);
    if (!report.valid()) {
      const Violation& v = *report.first();
      err << "verify: step " << v.step << " " << to_string(v.kind) << ": " << v.message << "\n";
      return kNotRefuted;
    }
    err << "verify: ok\n";
  }
  return r.refuted ? kOk : kNotRefuted;
}

// ------------------------------------------------------------------ verify

struct VerifyArgs {
  std::string cnf;
  std::string trace;
  std::string map;
  std::string order = "row-major";
};

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  const CnfFormula f = parse_dimacs(read_file(a.cnf));
  const VarOrderSpec order = parse_order_spec(a.order, f.num_vars(), load_map(a.cnf, a.map));
  const RefutationResult r = trace_from_jsonl(read_file(a.trace));
  const VerifyReport report = verify_refutation(f, order, r);
  ojson j;
  j["valid"] = report.valid();
  j["refuted"] = r.refuted;
  ojson vs = ojson::array();
  for (const Violation& v : report.violations) {
    vs.push_back({{"step", v.step}, {"kind", std::string(to_string(v.kind))}, {"message", v.message}});
  }
  j["violations"] = vs;
  out << j.dump() << "\n";
  if (!report.valid()) err << "trace rejected: " << report.violations.size() << " violation(s)\n";
  return report.valid() ? kOk : kNotRefuted;
}

// ------------------------------------------------------------------- sweep

struct SweepArgs {
  std::string cnf;
  std::string map;
  std::string php_range;
  std::string orders = "row-major";
  std::string schedules = "linear";
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
  std::string csv;
  long long node_budget = static_cast<long long>(RunLimits{}.node_budget);
  long long step_limit = static_cast<long long>(RunLimits{}.step_limit);
};

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  if (a.cnf.empty() == a.php_range.empty()) throw UsageError("give either a CNF file or --php-range, not both");
  if (a.jobs == 0) throw UsageError("--jobs must be positive");
  const auto order_specs = split_list(a.orders);
  const auto schedule_texts = split_list(a.schedules);
  if (order_specs.empty() || schedule_texts.empty()) throw UsageError("empty --orders or --schedules");
  std::vector<ScheduleSpec> schedules;
  for (const auto& s : schedule_texts) schedules.push_back(parse_schedule_spec(s, a.seed));

  struct Instance {
    std::string n;
    CnfFormula f;
    std::optional<PigeonMap> map;
  };
  std::vector<Instance> instances;
  if (!a.php_range.empty()) {
    const auto [lo, hi] = parse_range(a.php_range);
    for (int n = lo; n <= hi; ++n) {
      PhpInstance php = gen_php(n);
      instances.push_back({std::to_string(n), std::move(php.formula), php.map});
    }
  } else {
    auto map = load_map(a.cnf, a.map);
    instances.push_back({map ? std::to_string(map->holes()) : "", parse_dimacs(read_file(a.cnf)), map});
  }

  SweepOptions options;
  options.jobs = a.jobs;
  options.limits = make_limits(a.node_budget, a.step_limit);

  std::ostringstream csv;
  csv << "n,order,schedule,seed,refuted,max_intermediate,total_size,steps\n";
  std::size_t failures = 0;
  for (const Instance& inst : instances) {
    std::vector<VarOrderSpec> orders;
    for (const auto& o : order_specs) orders.push_back(parse_order_spec(o, inst.f.num_vars(), inst.map));
    for (const SweepRow& row : sweep(inst.f, orders, schedules, options)) {
      csv << inst.n << ',' << row.order_label << ',' << row.schedule_label << ','
          << (row.seed ? std::to_string(*row.seed) : "") << ',' << (row.refuted ? "true" : "false") << ','
          << row.max_intermediate << ',' << row.total_size << ',' << row.steps << '\n';
      if (!row.error.empty()) {
        ++failures;
        err << "n=" << inst.n << " order=" << row.order_label << " schedule=" << row.schedule_label << ": "
            << row.error << "\n";
      }
    }
  }
  if (a.csv.empty()) {
    out << csv.str();
  } else {
    write_file(a.csv, csv.str());
  }
  if (failures > 0) err << failures << " run(s) did not complete\n";
  return kOk;
}

// ------------------------------------------------------------- bound-check

struct BoundArgs {
  std::string input;
  std::string map;
  std::string order = "row-major";
  std::string cert;
  std::size_t max_free_bits = bounds::FoolingLimits{}.max_free_bits;
};

bool looks_like_json(const std::string& text) {
  const auto p = text.find_first_not_of(" \t\r\n");
  return p != std::string::npos && text[p] == '{';
}

int cmd_bound_check(const BoundArgs& a, std::ostream& out, std::ostream& err) {
  const std::string cert_text = read_file(a.cert);
  bounds::FoolingCertificate cert;
  try {
    cert = bounds::FoolingCertificate::from_json(cert_text);
  } catch (const std::exception& e) {
    throw UsageError(std::string("malformed certificate: ") + e.what());
  }
  const bounds::FoolingLimits limits{a.max_free_bits};
  const std::string input = read_file(a.input);

  bounds::FoolingVerdict verdict;
  if (looks_like_json(input)) {
    // {"vars": n, "table": "0110..."}, row r = assignment with bit v = x_v.
    oracle::TruthTable t;
    try {
      const auto j = nlohmann::json::parse(input);
      t = oracle::TruthTable::from_bits(j.at("vars").get<std::size_t>(), j.at("table").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw UsageError(std::string("malformed function file: ") + e.what());
    }
    const VarOrderSpec order = parse_order_spec(a.order, t.num_vars(), std::nullopt);
    NodeStore store(order.order);
    const NodeRef f = oracle::canonical_bdd(t, store);
    verdict = bounds::check_fooling(store, f, cert, limits);
  } else {
    const CnfFormula f = parse_dimacs(input);
    const VarOrderSpec order = parse_order_spec(a.order, f.num_vars(), load_map(a.input, a.map));
    verdict = bounds::check_fooling(f, order, cert, limits);
  }
  out << verdict.to_json(cert) << "\n";
  err << (verdict.certified ? "certified: size >= " + verdict.bound.str() : std::string("refuted: prefixes collide"))
      << " (actual size " << verdict.actual_size << ")\n";
  return kOk;
}

// ------------------------------------------------------------------- lemma

struct LemmaArgs {
  int n = 0;
  std::string order = "row-major";
  std::string coloring;
  std::string constant = "proven";
};

int cmd_lemma(const LemmaArgs& a, std::ostream& out, std::ostream& err) {
  bounds::LemmaConstant c;
  if (a.constant == "proven") {
    c = bounds::LemmaConstant::Proven;
  } else if (a.constant == "conjectured") {
    c = bounds::LemmaConstant::Conjectured;
    err << "note: the conjectured constant carries no correctness guarantee\n";
  } else {
    throw UsageError("--constant must be proven or conjectured");
  }

  std::optional<bounds::MatrixColoring> m;
  if (!a.coloring.empty()) {
    try {
      m = bounds::MatrixColoring::parse(read_file(a.coloring));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  } else {
    if (a.n < 1) throw UsageError("give --n (at least 1) or --coloring");
    const PigeonMap map(a.n);
    const VarOrderSpec order = parse_order_spec(a.order, map.num_vars(), map);
    m = bounds::matrix_from_split(bounds::color_split(order, static_cast<std::size_t>(a.n)));
  }
  err << m->to_string();

  const auto result = bounds::lemma_matrix_select(*m, c);
  if (const auto* inf = std::get_if<bounds::Infeasible>(&result)) {
    out << "infeasible: " << inf->reason << "\n";
    return kOk;
  }
  const auto& w = std::get<bounds::SelectionWitness>(result);
  const bool ok = bounds::verify_selection(w, *m);
  // Rows and columns printed 1-based, matching P_ij.
  auto entry = [](const bounds::Entry& e) { return ojson::array({e.row + 1, e.col + 1}); };
  ojson j;
  j["n"] = m->n();
  j["m"] = w.indices.size();
  j["kind"] = w.kind == bounds::SelectionWitness::Kind::Rows ? "rows" : "columns";
  ojson idx = ojson::array();
  for (auto i : w.indices) idx.push_back(i + 1);
  j["indices"] = idx;
  ojson pairs = ojson::array();
  for (const auto& [white, black] : w.pairs) pairs.push_back({{"white", entry(white)}, {"black", entry(black)}});
  j["pairs"] = pairs;
  j["verified"] = ok;
  out << j.dump() << "\n";
  return ok ? kOk : kNotRefuted;
}

// ------------------------------------------------------------------ oracle

int cmd_oracle(const std::string& cnf, std::ostream& out) {
  const CnfFormula f = parse_dimacs(read_file(cnf));
  const oracle::TruthTable t = oracle::table_of_cnf(f);
  ojson j;
  j["vars"] = f.num_vars();
  j["models"] = t.count_ones();
  j["satisfiable"] = !t.all_zero();
  j["size_identity"] = oracle::reduced_size(t, VarOrder::identity(f.num_vars()));
  if (f.num_vars() <= 7) {
    const auto best = oracle::min_size_over_orders(t);
    j["min_size"] = best.size;
    ojson seq = ojson::array();
    for (VarId v : best.order.sequence()) seq.push_back(v.index + 1);
    j["min_order"] = seq;
  }
  out << j.dump() << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"OBDD refutations of CNF formulas and lower-bound checkers", "obddproof"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "write PHP_n (or PC_n*) as DIMACS plus a pigeon map sidecar");
  g->add_option("--n", gen.n, "number of holes")->required();
  g->add_flag("--pc-star", gen.pc_star, "only the first n pigeon clauses");
  g->add_option("--out", gen.out, "output path; the map goes to <out>.map.json");

  RefuteArgs ref;
  auto* r = app.add_subcommand("refute", "run one OBDD refutation and print a summary line");
  r->add_option("cnf", ref.cnf, "DIMACS file")->required();
  r->add_option("--map", ref.map, "pigeon map JSON (default: <cnf>.map.json if present)");
  r->add_option("--order", ref.order, "row-major | column-major | random:<seed> | file:<path>");
  auto* sched = r->add_option("--schedule", ref.schedule, "builtin schedule kind");
  r->add_option("--schedule-file", ref.schedule_file, "JSON schedule")->excludes(sched);
  r->add_option("--seed", ref.seed, "seed for the random schedule");
  r->add_flag("--projection", ref.projection, "allow Project steps");
  r->add_option("--trace", ref.trace, "write the JSON-lines trace here");
  r->add_option("--csv", ref.csv, "write the per-step CSV here");
  r->add_option("--emit-schedule", ref.emit_schedule, "write the executed schedule as JSON");
  r->add_flag("--verify", ref.verify, "re-check the refutation independently");
  r->add_option("--node-budget", ref.node_budget, "maximum stored nodes");
  r->add_option("--step-limit", ref.step_limit, "maximum schedule steps");

  VerifyArgs ver;
  auto* v = app.add_subcommand("verify", "re-check a JSON-lines trace against a formula");
  v->add_option("cnf", ver.cnf, "DIMACS file")->required();
  v->add_option("--trace", ver.trace, "trace file")->required();
  v->add_option("--map", ver.map, "pigeon map JSON");
  v->add_option("--order", ver.order, "order the trace was produced under");

  SweepArgs sw;
  auto* s = app.add_subcommand("sweep", "run every (order, schedule) combination and emit CSV");
  s->add_option("cnf", sw.cnf, "DIMACS file");
  s->add_option("--map", sw.map, "pigeon map JSON");
  s->add_option("--php-range", sw.php_range, "generate PHP_a..PHP_b instead of reading a file");
  s->add_option("--orders", sw.orders, "comma-separated order specs");
  s->add_option("--schedules", sw.schedules, "comma-separated kinds; random:<seed> allowed");
  s->add_option("--seed", sw.seed, "seed for bare 'random' entries");
  s->add_option("--jobs", sw.jobs, "worker threads");
  s->add_option("--csv", sw.csv, "write CSV here instead of stdout");
  s->add_option("--node-budget", sw.node_budget, "maximum stored nodes per run");
  s->add_option("--step-limit", sw.step_limit, "maximum schedule steps per run");

  BoundArgs bc;
  auto* b = app.add_subcommand("bound-check", "check a fooling certificate and report the size bound");
  b->add_option("input", bc.input, "DIMACS file or {\"vars\":n,\"table\":\"...\"} function file")->required();
  b->add_option("--map", bc.map, "pigeon map JSON");
  b->add_option("--order", bc.order, "order spec");
  b->add_option("--cert", bc.cert, "certificate JSON {\"k\":..,\"A\":[..],\"z\":[..]}")->required();
  b->add_option("--max-free-bits", bc.max_free_bits, "limit on |A|");

  LemmaArgs lm;
  auto* l = app.add_subcommand("lemma", "matrix colouring selection for PC_n*");
  auto* ln = l->add_option("--n", lm.n, "number of holes");
  l->add_option("--order", lm.order, "order spec used to colour the matrix");
  l->add_option("--coloring", lm.coloring, "file of W/B rows")->excludes(ln);
  l->add_option("--constant", lm.constant, "proven | conjectured");

  std::string oracle_cnf;
  auto* o = app.add_subcommand("oracle", "truth-table diagnostics for a small formula");
  o->group("");
  o->add_option("cnf", oracle_cnf, "DIMACS file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (*g) return cmd_gen(gen, out, err);
    if (*r) return cmd_refute(ref, out, err);
    if (*v) return cmd_verify(ver, out, err);
    if (*s) return cmd_sweep(sw, out, err);
    if (*b) return cmd_bound_check(bc, out, err);
    if (*l) return cmd_lemma(lm, out, err);
    if (*o) return cmd_oracle(oracle_cnf, out);
  } catch (const NodeBudgetExceeded& e) {
    err << "error: " << e.what() << "\n";
    return kBudget;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace obddproof::cli
