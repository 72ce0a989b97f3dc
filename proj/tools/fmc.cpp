// fmc — command-line front end: typecheck, run, trace, transform and fuzz
// F_M programs. Results go to stdout, diagnostics to stderr. Exit codes:
// 0 success / equivalent / zero violations, 1 type errors or violations,
// 2 usage errors, 3 fuel exhaustion.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "fm/harness.hpp"
#include "fm/machine.hpp"
#include "fm/parser.hpp"
#include "fm/syntax.hpp"
#include "fm/typesys.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;
constexpr int kOutOfFuel = 3;

struct CommonOpts {
  std::string input;       // path to a .fm file
  std::string expr;        // inline program text (alternative to a path)
  std::string format = "text";
  uint64_t fuel = 10000;
};

uint64_t default_fuel() {
  if (const char* env = std::getenv("FM_FUEL")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && end != env) return (uint64_t)v;
  }
  return 10000;
}

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_input = true) {
  if (needs_input) {
    cmd->add_option("input", o.input, "path to a program file");
    cmd->add_option("-e,--expr", o.expr, "inline program text instead of a file");
  }
  cmd->add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({"text", "structured"}))
      ->capture_default_str();
  cmd->add_option("--fuel", o.fuel, "maximum number of machine steps")
      ->capture_default_str();
}

bool structured(const CommonOpts& o) { return o.format == "structured"; }

// Reads the program source; empty optional on usage problems (reported).
std::optional<std::string> read_source(const CommonOpts& o, std::string& display) {
  if (!o.expr.empty()) {
    display = "<expr>";
    return o.expr;
  }
  if (o.input.empty()) {
    std::cerr << "error: provide a program file or --expr\n";
    return std::nullopt;
  }
  std::ifstream in(o.input, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read " << o.input << "\n";
    return std::nullopt;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  display = o.input;
  return buf.str();
}

nlohmann::json diag_json(const fm::Diagnostic& d) {
  nlohmann::json j;
  j["line"] = d.span.line;
  j["column"] = d.span.column;
  j["length"] = d.span.length;
  j["message"] = d.message;
  j["rule"] = d.rule;
  j["expected"] = d.expected_type;
  j["actual"] = d.actual_type;
  return j;
}

void report_diagnostics(const std::string& display, const std::vector<fm::Diagnostic>& diags) {
  for (const fm::Diagnostic& d : diags) std::cerr << display << ":" << d.to_text() << "\n";
}

// Parses (and reports failures); null on any problem, with *code set.
fm::TermPtr load_program(const CommonOpts& o, std::string& display, int* code) {
  std::optional<std::string> src = read_source(o, display);
  if (!src) {
    *code = kUsage;
    return nullptr;
  }
  fm::ParseResult p = fm::parse_program(*src);
  if (!p.ok()) {
    report_diagnostics(display, p.diagnostics);
    if (structured(o)) {
      nlohmann::json j;
      j["ok"] = false;
      j["phase"] = "parse";
      for (const fm::Diagnostic& d : p.diagnostics) j["diagnostics"].push_back(diag_json(d));
      std::cout << j.dump(2) << "\n";
    }
    *code = kFailure;
    return nullptr;
  }
  return p.term;
}

int run_check(const CommonOpts& o) {
  std::string display;
  int code = kOk;
  fm::TermPtr term = load_program(o, display, &code);
  if (!term) return code;
  fm::TypecheckResult tc = fm::typecheck({}, {}, term);
  if (structured(o)) {
    nlohmann::json j;
    j["ok"] = tc.ok();
    j["phase"] = "typecheck";
    if (tc.ok()) j["type"] = fm::pretty_type(tc.typed->judged);
    for (const fm::Diagnostic& d : tc.diagnostics) j["diagnostics"].push_back(diag_json(d));
    std::cout << j.dump(2) << "\n";
  } else if (tc.ok()) {
    std::cout << fm::pretty_type(tc.typed->judged) << "\n";
  }
  if (!tc.ok()) {
    report_diagnostics(display, tc.diagnostics);
    return kFailure;
  }
  return kOk;
}

int finish_eval(const CommonOpts& o, const fm::EvalResult& r, bool with_trace) {
  if (structured(o)) {
    nlohmann::json j;
    switch (r.status) {
      case fm::EvalStatus::Value: j["status"] = "value"; break;
      case fm::EvalStatus::Stuck: j["status"] = "stuck"; break;
      case fm::EvalStatus::OutOfFuel: j["status"] = "out-of-fuel"; break;
    }
    if (r.cause) j["cause"] = fm::show_stuck_cause(*r.cause);
    j["steps"] = r.steps;
    j["term"] = fm::pretty_term(r.final_config.term);
    j["store"] = fm::show_store(r.final_config.store);
    if (with_trace) {
      j["trace"] = nlohmann::json::array();
      for (const fm::TraceEntry& e : r.trace) {
        nlohmann::json t;
        t["config"] = fm::show_config(e.config);
        t["rule"] = e.rule;
        j["trace"].push_back(t);
      }
    }
    std::cout << j.dump(2) << "\n";
  } else if (with_trace) {
    std::cout << fm::render_trace(r);
  } else {
    switch (r.status) {
      case fm::EvalStatus::Value:
        std::cout << fm::pretty_term(r.final_config.term) << "\n"
                  << fm::show_store(r.final_config.store) << "\n";
        break;
      case fm::EvalStatus::Stuck:
        std::cout << "stuck: " << fm::show_stuck_cause(r.cause.value_or(fm::StuckCause::Other))
                  << " in " << fm::show_config(r.final_config) << "\n";
        break;
      case fm::EvalStatus::OutOfFuel:
        std::cout << "out of fuel after " << r.steps << " steps in "
                  << fm::show_config(r.final_config) << "\n";
        break;
    }
  }
  if (r.status == fm::EvalStatus::Stuck) return kFailure;
  if (r.status == fm::EvalStatus::OutOfFuel) return kOutOfFuel;
  return kOk;
}

int run_eval(const CommonOpts& o, bool no_check, bool with_trace) {
  std::string display;
  int code = kOk;
  fm::TermPtr term = load_program(o, display, &code);
  if (!term) return code;
  if (!no_check) {
    fm::TypecheckResult tc = fm::typecheck({}, {}, term);
    if (!tc.ok()) {
      report_diagnostics(display, tc.diagnostics);
      return kFailure;
    }
  }
  fm::EvalResult r = fm::eval({term, {}, 1}, o.fuel, {}, with_trace);
  return finish_eval(o, r, with_trace);
}

int run_crest(const CommonOpts& o) {
  std::string display;
  int code = kOk;
  fm::TermPtr term = load_program(o, display, &code);
  if (!term) return code;
  fm::TypecheckResult tc = fm::typecheck({}, {}, term);
  if (!tc.ok()) {
    report_diagnostics(display, tc.diagnostics);
    return kFailure;
  }
  fm::TermPtr crested = fm::crest(*tc.typed);
  if (structured(o)) {
    nlohmann::json j;
    j["program"] = fm::pretty_term(term);
    j["crested"] = fm::pretty_term(crested);
    j["type"] = fm::pretty_type(tc.typed->judged);
    j["seals_added"] = fm::seal_count(crested) - fm::seal_count(term);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << fm::pretty_term(crested) << "\n";
  }
  return kOk;
}

int run_diff(const CommonOpts& o, bool erased) {
  std::string display;
  int code = kOk;
  fm::TermPtr term = load_program(o, display, &code);
  if (!term) return code;
  fm::DiffReport rep =
      erased ? fm::erased_run(term, o.fuel) : fm::diff_run(term, o.fuel);
  if (structured(o))
    std::cout << fm::to_json_text(rep) << "\n";
  else
    std::cout << fm::render(rep);
  if (rep.verdict != fm::DiffVerdict::Equivalent) return kFailure;
  if (!rep.completed && rep.original_status == fm::EvalStatus::OutOfFuel) return kOutOfFuel;
  return kOk;
}

struct FuzzOpts {
  uint64_t seed = 42;
  int count = 1000;
  int depth = 3;
  uint64_t fuel = 500;
  int oracle_depth = 8;
  int workers = 0;
  std::string format = "text";
};

int run_fuzz(const FuzzOpts& fo) {
  fm::CampaignOptions base;
  base.seed = fo.seed;
  base.count = fo.count;
  base.depth = fo.depth;
  base.fuel = fo.fuel;
  base.oracle_depth = fo.oracle_depth;
  base.workers = fo.workers;

  struct Entry {
    const char* name;
    fm::CampaignResult (*run)(const fm::CampaignOptions&);
  };
  const Entry entries[] = {
      {"nf", fm::campaign_nf},
      {"subtype-agreement", fm::campaign_subtype_agreement},
      {"monitor", fm::campaign_monitor},
      {"diff", fm::campaign_diff},
      {"erased", fm::campaign_erased},
  };

  bool all_ok = true;
  nlohmann::json j;
  j["seed"] = fo.seed;
  j["count"] = fo.count;
  j["depth"] = fo.depth;
  for (const Entry& e : entries) {
    fm::CampaignResult r = e.run(base);
    all_ok = all_ok && r.ok();
    if (fo.format == "structured") {
      nlohmann::json c;
      c["total"] = r.total;
      c["passed"] = r.passed;
      c["failures"] = r.failures;
      j["campaigns"][e.name] = c;
    } else {
      std::cout << e.name << ": " << r.passed << "/" << r.total << " passed";
      if (!r.ok()) std::cout << ", " << r.failures.size() << " FAILED";
      std::cout << "\n";
      for (const std::string& f : r.failures) std::cout << "  " << f << "\n";
    }
  }
  if (fo.format == "structured") {
    j["ok"] = all_ok;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << (all_ok ? "all campaigns passed" : "campaign failures detected") << "\n";
  }
  return all_ok ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"typechecker, abstract machine and metatheory harness for F_M programs"};
  app.require_subcommand(1);

  CommonOpts check_o, run_o, trace_o, crest_o, diff_o, erase_o;
  check_o.fuel = run_o.fuel = trace_o.fuel = crest_o.fuel = diff_o.fuel = erase_o.fuel =
      default_fuel();
  bool run_no_check = false;
  bool trace_no_check = false;
  FuzzOpts fuzz_o;

  CLI::App* check_cmd = app.add_subcommand("check", "typecheck a program and print its type");
  add_common(check_cmd, check_o);

  CLI::App* run_cmd = app.add_subcommand("run", "evaluate a program to a value");
  add_common(run_cmd, run_o);
  run_cmd->add_flag("--no-check", run_no_check, "skip typechecking (untyped mode)");

  CLI::App* trace_cmd = app.add_subcommand("trace", "print every machine configuration");
  add_common(trace_cmd, trace_o);
  trace_cmd->add_flag("--no-check", trace_no_check, "skip typechecking (untyped mode)");

  CLI::App* crest_cmd =
      app.add_subcommand("crest", "seal every subterm whose type is read-only");
  add_common(crest_cmd, crest_o);

  CLI::App* diff_cmd =
      app.add_subcommand("diff", "run a program against its crested form in lockstep");
  add_common(diff_cmd, diff_o);

  CLI::App* erase_cmd =
      app.add_subcommand("erase", "run a program against its seal-erased form in lockstep");
  add_common(erase_cmd, erase_o);

  CLI::App* fuzz_cmd = app.add_subcommand("fuzz", "generator campaigns over the metatheory");
  fuzz_cmd->add_option("--seed", fuzz_o.seed, "base random seed")->capture_default_str();
  fuzz_cmd->add_option("--count", fuzz_o.count, "cases per campaign")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  fuzz_cmd->add_option("--depth", fuzz_o.depth, "generator depth bound")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  fuzz_cmd->add_option("--fuel", fuzz_o.fuel, "machine steps per generated program")
      ->capture_default_str();
  fuzz_cmd->add_option("--oracle-depth", fuzz_o.oracle_depth, "declarative proof search depth")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  fuzz_cmd->add_option("--workers", fuzz_o.workers, "worker threads (0 = auto)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  fuzz_cmd->add_option("--format", fuzz_o.format, "output format")
      ->check(CLI::IsMember({"text", "structured"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (check_cmd->parsed()) return run_check(check_o);
    if (run_cmd->parsed()) return run_eval(run_o, run_no_check, false);
    if (trace_cmd->parsed()) return run_eval(trace_o, trace_no_check, true);
    if (crest_cmd->parsed()) return run_crest(crest_o);
    if (diff_cmd->parsed()) return run_diff(diff_o, false);
    if (erase_cmd->parsed()) return run_diff(erase_o, true);
    if (fuzz_cmd->parsed()) return run_fuzz(fuzz_o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}
