#pragma once

// Executable metatheory. The crest transformation turns static readonly
// claims into runtime seals; the differential and monitor runners then check,
// on concrete executions, the relations the metatheory promises: simulation
// between a term and its more-sealed counterpart, erasability of seals, and
// progress/preservation along every step.

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fm/machine.hpp"
#include "fm/syntax.hpp"
#include "fm/typesys.hpp"

namespace fm {

// Seal every subterm whose synthesized annotation is a readonly type
// (excluding Nat-typed subterms and subterms that already are seals).
TermPtr crest(const TypedTerm& tt);

// Remove every Seal node. seal_count(erase_seals(t)) == 0.
TermPtr erase_seals(const TermPtr& t);

enum class DiffVerdict { Equivalent, Violation };

// Joint outcome of running a term s against a more-sealed counterpart t
// (seal_leq(s, t)) in lockstep. "Sealed side" below always means t.
struct DiffReport {
  DiffVerdict verdict = DiffVerdict::Violation;
  std::string detail;  // first failed check and the step it failed at

  EvalStatus original_status = EvalStatus::OutOfFuel;
  EvalStatus transformed_status = EvalStatus::OutOfFuel;
  std::optional<StuckCause> original_cause;
  std::optional<StuckCause> transformed_cause;

  bool completed = false;       // both sides reached values within fuel
  bool value_leq = false;       // final values related by seal_leq
  bool stores_leq = false;      // final stores related by store_leq
  bool retype_ok = false;       // transformed/erased term retypes correctly
  uint64_t steps = 0;           // steps taken by the less-sealed side
  uint64_t discharge_steps = 0; // sealed-side steps that only shed a seal

  MachineConfig original_final;
  MachineConfig transformed_final;
};

// Lockstep driver realizing the paired-simulation relation; every sealed-side
// step must either track the original step or strictly drop the seal count.
DiffReport pair_run(const MachineConfig& less_sealed, const MachineConfig& more_sealed,
                    uint64_t fuel, const MachineOptions& opts = {});

// Typecheck, crest, run both, compare. retype_ok records that the crested
// term typechecks at the original type (up to normalization).
DiffReport diff_run(const TermPtr& program, uint64_t fuel, const MachineOptions& opts = {});

// Run the program against its seal-erased form. retype_ok records that the
// erased term checks at the original program's type, and that it keeps doing
// so at every step of its own run (under the store typing accumulated along
// that run), so dropping seals costs no static guarantees.
DiffReport erased_run(const TermPtr& program, uint64_t fuel, const MachineOptions& opts = {});

struct MonitorReport {
  bool ok = false;
  std::string detail;             // first violation, with configuration snapshot
  uint64_t steps = 0;
  uint64_t retype_checks = 0;     // successful per-step re-typechecks
  EvalStatus status = EvalStatus::OutOfFuel;
  std::optional<StuckCause> cause;
  StoreTyping final_typing;
};

// Step the program while re-typechecking every intermediate configuration
// (preservation) and demanding that non-values keep stepping (progress). The
// store typing grows at allocations with the field types the checking
// derivation demands of the allocating record literal (falling back to the
// stored values' synthesized types), and writes must be reflected in the
// store whenever old and new contents differ.
MonitorReport monitor_run(const TermPtr& program, uint64_t fuel, const MachineOptions& opts = {});

// As monitor_run, but checks every configuration against the given goal type
// instead of the program's own synthesized type. The program itself need not
// synthesize a type; it only has to check at `t0`.
MonitorReport monitor_run_at(const TermPtr& program, const TypePtr& t0, uint64_t fuel,
                             const MachineOptions& opts = {});

std::string render(const DiffReport& r);
std::string render(const MonitorReport& r);
std::string to_json_text(const DiffReport& r);
std::string to_json_text(const MonitorReport& r);

// ---------------------------------------------------------------------------
// Random generation

// Well-scoped random type over all constructors; variables drawn from ctx.
TypePtr gen_type(std::mt19937_64& rng, int depth, const TypeContext& ctx);

// Type-directed term generation: introduction forms for the target's head,
// interleaved with variable uses, applications, field reads and writes.
// Returns null on give-up (caller retries); successes typecheck at target.
TermPtr gen_well_typed(std::mt19937_64& rng, const TypeContext& ctx, const TypePtr& target,
                       uint64_t fuel);

// Closed program at a random target type; retries internally, never null.
TermPtr gen_program(std::mt19937_64& rng, int depth);

// Greedy counterexample reduction: erase seals, zero literals, prune record
// fields — keeping only rewrites that still typecheck and still fail.
TermPtr shrink(const TermPtr& t, const std::function<bool(const TermPtr&)>& still_fails);

// ---------------------------------------------------------------------------
// Campaigns

struct CampaignOptions {
  uint64_t seed = 42;
  int count = 1000;
  int depth = 3;
  uint64_t fuel = 500;
  int oracle_depth = 8;  // proof search bound for declarative cross-checks
  int workers = 0;       // 0: pick from hardware_concurrency
};

struct CampaignResult {
  int total = 0;
  int passed = 0;
  int gave_up = 0;  // generator retries exhausted; not failures
  std::vector<std::string> failures;  // "index N: detail"

  bool ok() const { return failures.empty(); }
};

// Deterministic per-index generator seed (stable across worker counts).
std::mt19937_64 rng_for_index(uint64_t seed, uint64_t index);

// Runs check(index, rng) over [0, count) on a small thread pool; a returned
// string is a failure description.
CampaignResult run_campaign(const CampaignOptions& opts,
                            const std::function<std::optional<std::string>(uint64_t, std::mt19937_64&)>& check);

// The bundled property campaigns, used by both the fuzz command and the
// acceptance suite.
CampaignResult campaign_nf(const CampaignOptions& opts);
CampaignResult campaign_subtype_agreement(const CampaignOptions& opts);
CampaignResult campaign_monitor(const CampaignOptions& opts);
CampaignResult campaign_diff(const CampaignOptions& opts);
CampaignResult campaign_erased(const CampaignOptions& opts);

}  // namespace fm
