#pragma once

// Small-step operational semantics: a store-based machine with left-to-right
// call-by-value evaluation and explicit congruence traversal. Seals are
// runtime wrappers; reads through a seal adapt their result, writes through a
// seal are stuck (each behavior is switchable for metatheory experiments).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fm/syntax.hpp"

namespace fm {

struct MachineOptions {
  bool sealed_read_adapts = true;     // reads of sealed records re-seal record results
  bool write_requires_unsealed = true;  // writes to sealed records are stuck
  bool write_updates_store = true;    // field writes actually mutate the store
};

struct MachineConfig {
  TermPtr term;
  Store store;
  uint64_t next_location = 1;
};

enum class StepStatus { Stepped, Value, Stuck };

enum class StuckCause {
  WriteThroughSeal,
  FieldMissing,
  NotARecord,
  NotAFunction,
  FreeVariable,
  Other,
};

std::string show_stuck_cause(StuckCause c);

struct StepResult {
  StepStatus status;
  MachineConfig config;          // successor configuration (input echoed back otherwise)
  std::string rule;              // redex rule that fired, "" otherwise
  std::optional<StuckCause> cause;
  // for write-field steps: the location written and the value written to it
  std::optional<std::pair<Location, TermPtr>> write_effect;
};

StepResult step(const MachineConfig& c, const MachineOptions& opts = {});

enum class EvalStatus { Value, Stuck, OutOfFuel };

struct TraceEntry {
  MachineConfig config;
  std::string rule;  // rule that produced this configuration ("" for the first)
};

struct EvalResult {
  EvalStatus status = EvalStatus::OutOfFuel;
  MachineConfig final_config;
  uint64_t steps = 0;
  std::optional<StuckCause> cause;
  std::vector<TraceEntry> trace;  // populated only when keep_trace is set
};

EvalResult eval(MachineConfig c, uint64_t fuel, const MachineOptions& opts = {},
                bool keep_trace = false);

// "⟨term, [0x0001: v, …]⟩", matching the trace notation used in docs/tests.
std::string show_config(const MachineConfig& c);
std::string render_trace(const EvalResult& r);

}  // namespace fm
