#include <functional>
#include <string>
#include <vector>

#include "doctest.h"
#include "fm/parser.hpp"
#include "fm/syntax.hpp"
#include "fm/typesys.hpp"
#include "helpers.hpp"

using namespace fm;
using fmtest::E;
using fmtest::T;

namespace {

bool leq(const std::string& s, const std::string& t) {
  return subtype({}, T(s), T(t)) == SubtypeAnswer::Yes;
}

bool leq_in(const TypeContext& ctx, const std::string& s, const std::string& t) {
  return subtype(ctx, T(s), T(t)) == SubtypeAnswer::Yes;
}

bool proven(const std::string& s, const std::string& t, int depth) {
  return subtype_oracle({}, T(s), T(t), depth) == OracleAnswer::Proven;
}

TypePtr type_of(const std::string& src) {
  TypecheckResult r = typecheck({}, {}, fmtest::E(src));
  REQUIRE_MESSAGE(r.ok(), "expected to typecheck: " << src);
  return r.typed->judged;
}

std::string first_rule(const std::string& src) {
  TypecheckResult r = typecheck({}, {}, fmtest::E(src));
  REQUIRE_FALSE(r.ok());
  REQUIRE_FALSE(r.diagnostics.empty());
  return r.diagnostics.front().rule;
}

}  // namespace

TEST_SUITE_BEGIN("typesys");

TEST_CASE("normal forms: readonly only over records and variables") {
  CHECK(is_normal(T("Top")));
  CHECK(is_normal(T("Nat")));
  CHECK(is_normal(T("{x: X} & readonly {y: Y}")));
  CHECK(is_normal(T("readonly X")));
  CHECK(is_normal(T("forall(X <: Top) Nat -> readonly {x: X}")));
  CHECK_FALSE(is_normal(T("readonly ({x: X} & {y: Y})")));
  CHECK_FALSE(is_normal(T("readonly Nat")));
  CHECK_FALSE(is_normal(T("readonly (Nat -> Nat)")));
  CHECK_FALSE(is_normal(T("readonly readonly {x: Nat}")));
  CHECK_FALSE(is_normal(T("{x: readonly Nat}")));
}

TEST_CASE("nf collapses repeated readonly") {
  CHECK(alpha_equal(nf(T("readonly readonly {x: Nat}")), T("readonly {x: Nat}")));
}

TEST_CASE("nf erases readonly on arrows, universals and scalars") {
  CHECK(alpha_equal(nf(T("readonly (Nat -> Nat)")), T("Nat -> Nat")));
  CHECK(alpha_equal(nf(T("readonly (forall(X <: Top) X)")), T("forall(X <: Top) X")));
  CHECK(alpha_equal(nf(T("readonly Nat")), T("Nat")));
  CHECK(alpha_equal(nf(T("readonly Top")), T("Top")));
}

TEST_CASE("nf distributes readonly over intersections") {
  CHECK(alpha_equal(nf(T("readonly ({x: X} & {y: Y})")),
                    T("readonly {x: X} & readonly {y: Y}")));
}

TEST_CASE("nf keeps readonly on records and variables") {
  CHECK(alpha_equal(nf(T("readonly {x: Nat}")), T("readonly {x: Nat}")));
  CHECK(alpha_equal(nf(T("readonly X")), T("readonly X")));
}

TEST_CASE("nf reaches under every constructor") {
  CHECK(alpha_equal(nf(T("{x: readonly readonly {y: Nat}}")), T("{x: readonly {y: Nat}}")));
  CHECK(alpha_equal(nf(T("readonly {x: Nat} -> readonly Nat")), T("readonly {x: Nat} -> Nat")));
  CHECK(alpha_equal(nf(T("forall(X <: readonly Nat) X")), T("forall(X <: Nat) X")));
}

TEST_CASE("nf is idempotent and fixes normal types") {
  const char* samples[] = {
      "Top", "Nat", "readonly readonly {x: Nat}", "readonly ({x: X} & {y: Y})",
      "forall(X <: readonly (Nat -> Nat)) readonly X",
      "{a: readonly ({x: Nat} & {y: Top})} & readonly {b: Nat}",
  };
  for (const char* s : samples) {
    CAPTURE(s);
    TypePtr n = nf(T(s));
    CHECK(is_normal(n));
    CHECK(alpha_equal(nf(n), n));
  }
  CHECK(alpha_equal(nf(T("{x: X} & readonly {y: Y}")), T("{x: X} & readonly {y: Y}")));
}

TEST_CASE("mutable records are subtypes of their readonly counterparts") {
  CHECK(leq("{x: Nat}", "readonly {x: Nat}"));
  CHECK(leq("{x: {y: Nat}}", "readonly {x: {y: Nat}}"));
}

TEST_CASE("readonly is idempotent up to subtyping") {
  for (const char* s : {"{x: Nat}", "Nat -> Nat", "{x: Nat} & {y: Top}"}) {
    CAPTURE(s);
    std::string t(s);
    CHECK(subtype({}, ty::readonly(ty::readonly(T(t))), ty::readonly(T(t))) ==
          SubtypeAnswer::Yes);
    CHECK(subtype({}, ty::readonly(T(t)), ty::readonly(ty::readonly(T(t)))) ==
          SubtypeAnswer::Yes);
  }
}

TEST_CASE("readonly records do not widen back to mutable") {
  CHECK_FALSE(leq("readonly {x: Nat}", "{x: Nat}"));
}

TEST_CASE("everything is below Top; intersections project and pair") {
  CHECK(leq("forall(X <: Top) X -> X", "Top"));
  CHECK(leq("{x: Nat} & {y: Nat}", "{x: Nat}"));
  CHECK(leq("{x: Nat} & {y: Nat}", "{y: Nat}"));
  CHECK(leq("{x: Nat}", "{x: Nat} & Top"));
  CHECK_FALSE(leq("{x: Nat}", "{x: Nat} & {y: Nat}"));
  CHECK(leq("{x: Nat} & {y: Nat}", "{y: Nat} & {x: Nat}"));
}

TEST_CASE("arrows are contravariant in domains, covariant in codomains") {
  CHECK(leq("Top -> Nat", "Nat -> Nat"));
  CHECK(leq("Nat -> Nat", "Nat -> Top"));
  CHECK_FALSE(leq("Nat -> Nat", "Top -> Nat"));
  CHECK(leq("readonly {x: Nat} -> Nat", "{x: Nat} -> Nat"));
}

TEST_CASE("universals use contravariant bounds and covariant bodies") {
  CHECK(leq("forall(X <: Top) X", "forall(X <: Nat) X"));
  CHECK(leq("forall(X <: Nat) X", "forall(X <: Nat) Nat"));
  CHECK_FALSE(leq("forall(X <: Nat) X", "forall(X <: Top) X"));
  CHECK_FALSE(leq("forall(X <: Nat) Nat", "forall(X <: Nat) X"));
}

TEST_CASE("record fields are invariant in both directions") {
  CHECK_FALSE(leq("{x: Nat}", "{x: Top}"));
  CHECK_FALSE(leq("{x: Top}", "{x: Nat}"));
  CHECK_FALSE(leq("{x: Nat}", "readonly {x: Top}"));
  CHECK(leq("readonly {x: Nat}", "readonly {x: Nat}"));
  CHECK(leq("{x: {y: Nat} & Top}", "{x: {y: Nat}}"));  // equivalent fields are fine
}

TEST_CASE("type variables chase their bounds") {
  TypeContext ctx = TypeContext{}.with_tyvar("X", T("{x: Nat}"));
  CHECK(leq_in(ctx, "X", "X"));
  CHECK(leq_in(ctx, "X", "{x: Nat}"));
  CHECK(leq_in(ctx, "X", "readonly {x: Nat}"));
  CHECK(leq_in(ctx, "X", "readonly X"));
  CHECK(leq_in(ctx, "readonly X", "readonly {x: Nat}"));
  CHECK_FALSE(leq_in(ctx, "readonly X", "{x: Nat}"));
  CHECK_FALSE(leq_in(ctx, "{x: Nat}", "X"));
}

TEST_CASE("readonly is monotone") {
  TypeContext ctx = TypeContext{}.with_tyvar("X", T("{x: Nat} & {y: Nat}"));
  CHECK(leq_in(ctx, "readonly X", "readonly {x: Nat}"));
}

TEST_CASE("subtyping reports fuel exhaustion distinctly") {
  CHECK(subtype({}, T("Nat"), T("Nat"), 0) == SubtypeAnswer::OutOfFuel);
  CHECK(subtype({}, T("Nat"), T("Nat")) == SubtypeAnswer::Yes);
  CHECK(subtype({}, T("Nat"), T("{x: Nat}")) == SubtypeAnswer::No);
}

TEST_CASE("oracle proves the normalization equivalence on samples") {
  const char* samples[] = {
      "readonly readonly {x: Nat}",
      "readonly (Nat -> Nat)",
      "readonly ({x: Nat} & {y: Nat})",
      "{x: readonly Nat}",
      "forall(X <: readonly Top) readonly X",
  };
  for (const char* s : samples) {
    CAPTURE(s);
    TypePtr t = T(s);
    CHECK(subtype_oracle({}, t, nf(t), 8) == OracleAnswer::Proven);
    CHECK(subtype_oracle({}, nf(t), t, 8) == OracleAnswer::Proven);
  }
}

TEST_CASE("oracle refuses unprovable claims within depth") {
  CHECK_FALSE(proven("Top", "{x: Nat}", 8));
  CHECK_FALSE(proven("readonly {x: Nat}", "{x: Nat}", 8));
  CHECK_FALSE(proven("{x: Nat}", "{x: Top}", 8));
}

TEST_CASE("oracle proves basic facts at small depth") {
  CHECK(proven("{x: Nat} & {y: Nat}", "{x: Nat}", 8));
  CHECK(proven("{x: Nat}", "readonly {x: Nat}", 4));
  CHECK(proven("{x: Nat}", "Top", 4));
  CHECK(proven("Nat", "Nat", 4));
}

TEST_CASE("readonly-fixed types are exactly those nf(readonly T) = nf(T)") {
  CHECK(is_readonly_type(T("readonly {x: Nat}")));
  CHECK(is_readonly_type(T("Nat -> Nat")));
  CHECK(is_readonly_type(T("Nat")));
  CHECK(is_readonly_type(T("Top")));
  CHECK(is_readonly_type(T("readonly {x: Nat} & readonly {y: Nat}")));
  CHECK(is_readonly_type(T("forall(X <: Top) X")));
  CHECK_FALSE(is_readonly_type(T("{x: Nat}")));
  CHECK_FALSE(is_readonly_type(T("{x: Nat} & readonly {y: Nat}")));
  CHECK_FALSE(is_readonly_type(T("X")));
}

TEST_CASE("sealing synthesizes a readonly type") {
  CHECK(alpha_equal(type_of("seal {x = 10}"), T("readonly {x: Nat}")));
}

TEST_CASE("reads through readonly receivers viewpoint-adapt") {
  TypeContext ctx = TypeContext{}.with_term("z", T("readonly {first: {x: Nat}}"));
  TypecheckResult r = typecheck(ctx, {}, E("z.first"));
  REQUIRE(r.ok());
  CHECK(alpha_equal(nf(r.typed->judged), nf(T("readonly {x: Nat}"))));
}

TEST_CASE("reads through mutable receivers stay mutable") {
  TypeContext ctx = TypeContext{}.with_term("p", T("{first: {x: Nat}} & {second: Nat}"));
  TypecheckResult r = typecheck(ctx, {}, E("p.first"));
  REQUIRE(r.ok());
  CHECK(alpha_equal(r.typed->judged, T("{x: Nat}")));
}

TEST_CASE("writes through readonly receivers are rejected with the right rule") {
  TypeContext ctx = TypeContext{}.with_term("y", T("readonly {first: Nat}"));
  TypecheckResult r = typecheck(ctx, {}, E("y.first := 7"));
  REQUIRE_FALSE(r.ok());
  CHECK(r.diagnostics.front().rule == "write-through-readonly");
}

TEST_CASE("writes synthesize the field type and check the source against it") {
  CHECK(alpha_equal(type_of("{x = 10}.x := 5"), T("Nat")));
  TypeContext ctx = TypeContext{}.with_term("p", T("{first: Nat} & {second: Nat}"));
  TypecheckResult r = typecheck(ctx, {}, E("p.first := p.second"));
  REQUIRE(r.ok());
  CHECK(alpha_equal(r.typed->judged, T("Nat")));
  TypecheckResult bad = typecheck(ctx, {}, E("p.first := fun(x: Nat) x"));
  CHECK_FALSE(bad.ok());
}

TEST_CASE("application checks the argument against the domain by subsumption") {
  CHECK(alpha_equal(type_of("(fun(x: Nat) x) 5"), T("Nat")));
  CHECK(alpha_equal(type_of("(fun(r: readonly {x: Nat}) r) {x = 5}"),
                    T("readonly {x: Nat}")));
  CHECK(first_rule("(fun(x: Nat) x) {y = 1}") == "argument-type-mismatch");
  CHECK(first_rule("5 5") == "not-a-function");
}

TEST_CASE("type application instantiates and checks the bound") {
  CHECK(alpha_equal(type_of("(tfun(X <: Top) fun(x: X) x)[Nat] 41"), T("Nat")));
  CHECK(alpha_equal(type_of("(tfun(X <: Top) fun(x: X) x)[readonly {x: Nat}]"),
                    T("readonly {x: Nat} -> readonly {x: Nat}")));
  CHECK(first_rule("(tfun(X <: {x: Nat}) fun(r: X) r)[Nat]") == "type-argument-mismatch");
}

TEST_CASE("record literals synthesize intersections of single-field records") {
  CHECK(alpha_equal(type_of("{x = 5}"), T("{x: Nat}")));
  CHECK(alpha_equal(type_of("{x = 5, y = {z = 1}}"), T("{x: Nat} & {y: {z: Nat}}")));
}

TEST_CASE("unknown names produce diagnostics") {
  CHECK(first_rule("missing") == "unbound-variable");
  CHECK(first_rule("fun(x: X) x") == "unbound-type-variable");
  CHECK(first_rule("{x = 5}.y") == "field-not-present");
}

TEST_CASE("type binders shadowing the context are renamed in the result") {
  TypeContext ctx = TypeContext{}.with_tyvar("X", T("Top"));
  TypecheckResult r = typecheck(ctx, {}, E("tfun(X <: Nat) fun(x: X) x"));
  REQUIRE(r.ok());
  REQUIRE(r.typed->judged->kind == TypeKind::Forall);
  CHECK(r.typed->judged->name != "X");
  CHECK(r.typed->root->term->name != "X");
  CHECK(alpha_equal(r.typed->judged, T("forall(Y <: Nat) Y -> Y")));
}

TEST_CASE("store checking compares domains and pointwise types") {
  CHECK(check_store({}, StoreTyping{}, Store{}).ok);
  StoreTyping sigma;
  sigma.entries[1] = T("Nat");
  Store store;
  store.entries[1] = E("10");
  CHECK(check_store({}, sigma, store).ok);
  store.entries[1] = E("{x = 10}");  // {x : Nat} is not a subtype of Nat
  CHECK_FALSE(check_store({}, sigma, store).ok);
  store.entries.erase(1);
  CHECK_FALSE(check_store({}, sigma, store).ok);
  store.entries[1] = E("10");
  store.entries[2] = E("11");
  CHECK_FALSE(check_store({}, sigma, store).ok);
}

TEST_CASE("store-typed record values synthesize from sigma") {
  StoreTyping sigma;
  sigma.entries[1] = T("Nat");
  TypecheckResult r = typecheck({}, sigma, tm::record_val({{"x", Location{1}}}));
  REQUIRE(r.ok());
  CHECK(alpha_equal(r.typed->judged, T("{x: Nat}")));
  TypecheckResult miss = typecheck({}, StoreTyping{}, tm::record_val({{"x", Location{9}}}));
  REQUIRE_FALSE(miss.ok());
  CHECK(miss.diagnostics.front().rule == "unknown-location");
}

TEST_CASE("sealed record values only ever type as readonly records or Top") {
  StoreTyping sigma;
  sigma.entries[1] = T("Nat");
  TermPtr v = tm::seal(tm::record_val({{"x", Location{1}}}));
  TypecheckResult r = typecheck({}, sigma, v);
  REQUIRE(r.ok());
  TypePtr n = nf(r.typed->judged);
  std::vector<TypePtr> comps;
  std::function<void(const TypePtr&)> flat = [&](const TypePtr& t) {
    if (t->kind == TypeKind::Intersect) {
      flat(t->a);
      flat(t->b);
    } else {
      comps.push_back(t);
    }
  };
  flat(n);
  for (const TypePtr& c : comps) {
    bool ok = c->kind == TypeKind::Top ||
              (c->kind == TypeKind::Readonly && c->a->kind == TypeKind::Record);
    CHECK(ok);
  }
}

TEST_CASE("the mutable elimination wins when both field rules apply") {
  TypeContext ctx = TypeContext{}.with_term("p", T("{x: Nat} & readonly {x: Nat}"));
  TypecheckResult r = typecheck(ctx, {}, E("p.x"));
  REQUIRE(r.ok());
  CHECK(alpha_equal(r.typed->judged, T("Nat")));
}

TEST_SUITE_END();
