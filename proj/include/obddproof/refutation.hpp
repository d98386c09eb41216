#pragma once

// Execution and re-checking of OBDD refutations: sequences of Axiom / Join
// (and optionally Project) steps evaluated under one fixed variable order.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "obddproof/bdd.hpp"
#include "obddproof/cnf.hpp"
#include "obddproof/order.hpp"

namespace obddproof {

enum class StepKind { Axiom, Join, Project };

std::string_view to_string(StepKind kind);

struct ProofStep {
  StepKind kind = StepKind::Axiom;
  std::size_t clause = 0;  // Axiom
  std::size_t left = 0;    // Join
  std::size_t right = 0;   // Join
  std::size_t source = 0;  // Project
  VarId var;               // Project

  static ProofStep axiom(std::size_t clause) { return {StepKind::Axiom, clause, 0, 0, 0, {}}; }
  static ProofStep join(std::size_t left, std::size_t right) { return {StepKind::Join, 0, left, right, 0, {}}; }
  static ProofStep project(std::size_t source, VarId var) { return {StepKind::Project, 0, 0, 0, source, var}; }

  friend bool operator==(const ProofStep&, const ProofStep&) = default;
};

struct Schedule {
  std::vector<ProofStep> steps;
  bool projection_enabled = false;

  friend bool operator==(const Schedule&, const Schedule&) = default;
};

class ScheduleError : public std::invalid_argument {
 public:
  ScheduleError(std::size_t step, const std::string& what);
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

// Throws ScheduleError naming the first malformed step: forward or self
// reference, clause index out of range, Project while projection is
// disabled, or an empty schedule.
void validate_schedule(const Schedule& s, const CnfFormula& f);

// JSON list of {"op":"axiom","clause":c} | {"op":"join","left":i,"right":j}
// | {"op":"project","source":i,"var":v} with v a 0-based variable index.
std::string schedule_to_json(const Schedule& s);
Schedule schedule_from_json(std::string_view text, bool projection_enabled);

struct TraceRecord {
  std::size_t step = 0;
  ProofStep op;
  std::vector<std::size_t> clauses;  // Cls(B_i), sorted
  std::size_t size = 0;
  std::uint64_t cum_size = 0;
  std::size_t peak_nodes = 0;
  // Which terminal B_i is, if any.
  std::optional<bool> constant;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

struct RunLimits {
  std::size_t step_limit = 1'000'000;
  std::size_t node_budget = 50'000'000;
};

struct RefutationResult {
  std::vector<TraceRecord> trace;
  bool refuted = false;
  bool truncated = false;
  std::size_t max_intermediate = 0;
  std::uint64_t total_size = 0;
  // Present for results produced by run_schedule; absent when loaded from a
  // trace file.
  std::shared_ptr<NodeStore> store;
  std::vector<NodeRef> step_bdds;
  NodeRef final;
};

RefutationResult run_schedule(const CnfFormula& f, const VarOrderSpec& order, const Schedule& s,
                              const RunLimits& limits = {});

enum class ScheduleKind { Linear, BalancedTree, Gz2003, Random, GreedyMinSize, BucketProjection };

std::string_view to_string(ScheduleKind kind);
ScheduleKind parse_schedule_kind(std::string_view name);

// linear: fold in clause order. balanced_tree: pairwise rounds. gz2003:
// positive clauses, then the rest, then one final join. random: seeded
// shuffle then fold. greedy_min_size: repeatedly join the live pair with the
// smallest conjunction. bucket_projection: bucket elimination, last variable
// in the order first, projecting each variable once no unjoined clause
// mentions it.
struct ScheduleOptions {
  std::optional<std::uint64_t> seed;  // required by random
  bool projection_enabled = false;    // required by bucket_projection
  RunLimits limits;                   // greedy_min_size evaluates candidate joins
};

Schedule builtin_schedule(const CnfFormula& f, ScheduleKind kind, const VarOrderSpec& order,
                          const ScheduleOptions& options = {});

enum class ViolationKind { Malformed, ClauseSet, Semantic, Size, CumulativeSize, Terminal, Accounting };

std::string_view to_string(ViolationKind kind);

struct Violation {
  std::size_t step;
  ViolationKind kind;
  std::string message;
};

struct VerifyReport {
  std::vector<Violation> violations;
  bool valid() const { return violations.empty(); }
  const Violation* first() const { return violations.empty() ? nullptr : &violations.front(); }
};

struct VerifyOptions {
  // Recompute this Join with OR instead of AND. Used to exercise the checker.
  std::optional<std::size_t> fault_join_as_or;
};

// Re-executes every step in a fresh store and compares against the claimed
// OBDDs (when present), clause sets, sizes, accounting and the final verdict.
VerifyReport verify_refutation(const CnfFormula& f, const VarOrderSpec& order, const RefutationResult& r,
                               const VerifyOptions& options = {});

// One JSON object per line.
std::string trace_to_jsonl(const RefutationResult& r);
RefutationResult trace_from_jsonl(std::string_view text);
// Header: step,kind,size,cum_size,clauses (clause indices space-separated).
std::string trace_to_csv(const RefutationResult& r);

struct ScheduleSpec {
  ScheduleKind kind = ScheduleKind::Linear;
  std::optional<std::uint64_t> seed;

  std::string label() const;
};

struct SweepRow {
  std::size_t order_index = 0;
  std::size_t schedule_index = 0;
  std::string order_label;
  std::string schedule_label;
  std::optional<std::uint64_t> seed;
  bool refuted = false;
  bool truncated = false;
  std::size_t max_intermediate = 0;
  std::uint64_t total_size = 0;
  std::size_t steps = 0;
  std::string error;  // empty when the run completed
};

struct SweepOptions {
  unsigned jobs = 1;
  RunLimits limits;
};

// One row per (order, schedule) pair, ordered by (order index, schedule
// index) regardless of how many workers ran.
std::vector<SweepRow> sweep(const CnfFormula& f, std::span<const VarOrderSpec> orders,
                            std::span<const ScheduleSpec> schedules, const SweepOptions& options = {});

}  // namespace obddproof
