#include <string>
#include <vector>

#include "doctest.h"
#include "fm/machine.hpp"
#include "fm/parser.hpp"
#include "fm/syntax.hpp"
#include "helpers.hpp"

using namespace fm;
using fmtest::E;
using fmtest::P;

namespace {

MachineConfig initial(const TermPtr& t) { return MachineConfig{t, {}, 1}; }

std::vector<std::string> rules_of(const EvalResult& r) {
  std::vector<std::string> out;
  for (size_t i = 1; i < r.trace.size(); ++i) out.push_back(r.trace[i].rule);
  return out;
}

}  // namespace

TEST_SUITE_BEGIN("machine");

TEST_CASE("a field write allocates, then returns the old value") {
  EvalResult r = eval(initial(E("{x = 10}.x := 5")), 100, {}, true);
  REQUIRE(r.status == EvalStatus::Value);
  CHECK(r.steps == 2);
  REQUIRE(r.trace.size() == 3);
  CHECK(r.trace[0].rule == "");
  CHECK(r.trace[1].rule == "alloc");
  CHECK(r.trace[2].rule == "write-field");
  CHECK(show_config(r.trace[0].config) == "⟨{x = 10}.x := 5, []⟩");
  CHECK(show_config(r.trace[1].config) == "⟨{x : 0x0001}.x := 5, [0x0001: 10]⟩");
  CHECK(show_config(r.final_config) == "⟨10, [0x0001: 5]⟩");
}

TEST_CASE("reading a record field out of a sealed record re-seals it") {
  EvalResult r = eval(initial(E("(seal {y = {x = 10}}).y")), 100, {}, true);
  REQUIRE(r.status == EvalStatus::Value);
  CHECK(r.steps == 3);
  CHECK(rules_of(r) == std::vector<std::string>{"alloc", "alloc", "sealed-field"});
  CHECK(show_config(r.final_config) ==
        "⟨seal {x : 0x0001}, [0x0001: 10, 0x0002: {x : 0x0001}]⟩");
}

TEST_CASE("writing through a seal is stuck with the seal blamed") {
  EvalResult r = eval(initial(E("(seal {x = 10}).x := 5")), 100, {}, true);
  REQUIRE(r.status == EvalStatus::Stuck);
  REQUIRE(r.cause.has_value());
  CHECK(*r.cause == StuckCause::WriteThroughSeal);
  CHECK(r.steps == 1);  // exactly the allocation happened first
  CHECK(show_config(r.final_config) ==
        "⟨(seal {x : 0x0001}).x := 5, [0x0001: 10]⟩");
  CHECK(render_trace(r) ==
        "⟨(seal {x = 10}).x := 5, []⟩\n"
        "⟨(seal {x : 0x0001}).x := 5, [0x0001: 10]⟩  (alloc)\n"
        "stuck: write-through-seal\n");
}

TEST_CASE("seals fall away from functions and numbers") {
  EvalResult r = eval(initial(E("(seal (fun(x: Nat) x)) 5")), 100, {}, true);
  REQUIRE(r.status == EvalStatus::Value);
  CHECK(rules_of(r) == std::vector<std::string>{"seal-pass", "beta"});
  CHECK(pretty_term(r.final_config.term) == "5");
  CHECK(r.final_config.store.entries.empty());

  EvalResult n = eval(initial(E("seal 7")), 100);
  REQUIRE(n.status == EvalStatus::Value);
  CHECK(n.steps == 1);
  CHECK(pretty_term(n.final_config.term) == "7");
}

TEST_CASE("stacked seals over a record collapse to one") {
  EvalResult r = eval(initial(E("seal (seal {x = 10})")), 100, {}, true);
  REQUIRE(r.status == EvalStatus::Value);
  CHECK(r.steps == 2);
  CHECK(rules_of(r) == std::vector<std::string>{"alloc", "seal-collapse"});
  CHECK(pretty_term(r.final_config.term) == "seal {x : 0x0001}");
  CHECK(is_value(r.final_config.term));
}

TEST_CASE("repeated sealing of a non-record sheds one seal per step") {
  TermPtr t = E("seal (seal (seal 5))");
  MachineConfig c = initial(t);
  uint64_t count = seal_count(c.term);
  CHECK(count == 3);
  for (int i = 0; i < 3; ++i) {
    StepResult s = step(c);
    REQUIRE(s.status == StepStatus::Stepped);
    CHECK(seal_count(s.config.term) == count - 1);
    count = seal_count(s.config.term);
    c = s.config;
  }
  CHECK(pretty_term(c.term) == "5");
}

TEST_CASE("values need no fuel") {
  EvalResult r = eval(initial(E("10")), 0);
  CHECK(r.status == EvalStatus::Value);
  CHECK(r.steps == 0);
  CHECK(r.trace.empty());
  CHECK(show_config(r.final_config) == "⟨10, []⟩");
}

TEST_CASE("divergence runs out of fuel") {
  EvalResult r = eval(initial(E("(fun(x: Top) x x) (fun(x: Top) x x)")), 100);
  CHECK(r.status == EvalStatus::OutOfFuel);
  CHECK(r.steps == 100);
  CHECK(render_trace(r) == "out of fuel after 100 steps\n");
}

TEST_CASE("type application substitutes the argument") {
  EvalResult r = eval(initial(E("(tfun(X <: Top) fun(x: X) x)[Nat] 41")), 100, {}, true);
  REQUIRE(r.status == EvalStatus::Value);
  CHECK(rules_of(r) == std::vector<std::string>{"type-beta", "beta"});
  CHECK(pretty_term(r.final_config.term) == "41");
  EvalResult one = eval(initial(E("(tfun(X <: Top) fun(x: X) x)[Nat]")), 100);
  REQUIRE(one.status == EvalStatus::Value);
  CHECK(alpha_equal(one.final_config.term, E("fun(x: Nat) x")));
}

TEST_CASE("stepping is deterministic") {
  MachineConfig c = initial(E("{a = (fun(x: Nat) x) 1, b = 2}.a"));
  for (;;) {
    StepResult r1 = step(c);
    StepResult r2 = step(c);
    CHECK(r1.status == r2.status);
    CHECK(r1.rule == r2.rule);
    CHECK(alpha_equal(r1.config.term, r2.config.term));
    CHECK(r1.config.next_location == r2.config.next_location);
    if (r1.status != StepStatus::Stepped) break;
    c = r1.config;
  }
}

TEST_CASE("the store only grows and locations are never reused") {
  EvalResult r = eval(initial(E("{a = {b = 1}, c = 2}.a")), 100, {}, true);
  REQUIRE(r.status == EvalStatus::Value);
  for (size_t i = 1; i < r.trace.size(); ++i) {
    const Store& prev = r.trace[i - 1].config.store;
    const Store& now = r.trace[i].config.store;
    for (const auto& [index, value] : prev.entries) CHECK(now.entries.count(index) == 1);
    CHECK(r.trace[i].config.next_location >= r.trace[i - 1].config.next_location);
  }
  CHECK(r.final_config.store.size() == 3);
  CHECK(r.final_config.next_location == 4);
  CHECK(pretty_term(r.final_config.term) == "{b : 0x0001}");
}

TEST_CASE("allocation hands out one location per field, in field order") {
  EvalResult r = eval(initial(E("{x = 1, y = 2, z = 3}")), 100);
  REQUIRE(r.status == EvalStatus::Value);
  CHECK(pretty_term(r.final_config.term) == "{x : 0x0001, y : 0x0002, z : 0x0003}");
  CHECK(show_store(r.final_config.store) == "[0x0001: 1, 0x0002: 2, 0x0003: 3]");
}

TEST_CASE("stuck shapes and their causes") {
  auto stuck_cause = [](const char* src) {
    EvalResult r = eval(initial(fmtest::E(src)), 100);
    REQUIRE_MESSAGE(r.status == EvalStatus::Stuck, "expected stuck: " << src);
    REQUIRE(r.cause.has_value());
    return *r.cause;
  };
  CHECK(stuck_cause("{x = 10}.y") == StuckCause::FieldMissing);
  CHECK(stuck_cause("5 5") == StuckCause::NotAFunction);
  CHECK(stuck_cause("5[Nat]") == StuckCause::NotAFunction);
  CHECK(stuck_cause("x") == StuckCause::FreeVariable);
  CHECK(stuck_cause("5.x") == StuckCause::NotARecord);
  CHECK(stuck_cause("5.x := 1") == StuckCause::NotARecord);
  CHECK(stuck_cause("(seal {x = 10}).x := 5") == StuckCause::WriteThroughSeal);
}

TEST_CASE("a write reports its effect on the store") {
  EvalResult setup = eval(initial(E("{x = 10}")), 10);
  REQUIRE(setup.status == EvalStatus::Value);
  MachineConfig c{tm::field_write(setup.final_config.term, "x", tm::nat_lit(5)),
                  setup.final_config.store, setup.final_config.next_location};
  StepResult r = step(c);
  REQUIRE(r.status == StepStatus::Stepped);
  REQUIRE(r.write_effect.has_value());
  CHECK(r.write_effect->first == Location{1});
  CHECK(alpha_equal(r.write_effect->second, tm::nat_lit(5)));
  CHECK(alpha_equal(r.config.term, tm::nat_lit(10)));
}

TEST_CASE("switch: sealed reads can hand back the bare record") {
  MachineOptions opts;
  opts.sealed_read_adapts = false;
  EvalResult r = eval(initial(E("(seal {y = {x = 10}}).y")), 100, opts);
  REQUIRE(r.status == EvalStatus::Value);
  CHECK(pretty_term(r.final_config.term) == "{x : 0x0001}");  // no re-seal
}

TEST_CASE("switch: writes through seals can be let through") {
  MachineOptions opts;
  opts.write_requires_unsealed = false;
  EvalResult r = eval(initial(E("(seal {x = 10}).x := 5")), 100, opts);
  REQUIRE(r.status == EvalStatus::Value);
  CHECK(show_config(r.final_config) == "⟨10, [0x0001: 5]⟩");
}

TEST_CASE("switch: writes can leave the store untouched") {
  MachineOptions opts;
  opts.write_updates_store = false;
  EvalResult r = eval(initial(E("{x = 10}.x := 5")), 100, opts);
  REQUIRE(r.status == EvalStatus::Value);
  CHECK(show_config(r.final_config) == "⟨10, [0x0001: 10]⟩");
}

TEST_CASE("programs from files evaluate as advertised") {
  EvalResult r = eval(initial(P("def id = fun(x: Nat) x\nid (id 7)")), 100, {}, true);
  REQUIRE(r.status == EvalStatus::Value);
  CHECK(rules_of(r) == std::vector<std::string>{"beta", "beta"});
  CHECK(pretty_term(r.final_config.term) == "7");
}

TEST_SUITE_END();
