#include "doctest.h"
#include "fm/syntax.hpp"
#include "helpers.hpp"

using namespace fm;
using fmtest::E;
using fmtest::T;

TEST_SUITE_BEGIN("syntax");

TEST_CASE("alpha equality ignores binder names") {
  CHECK(alpha_equal(E("fun(x: Nat) x"), E("fun(y: Nat) y")));
  CHECK(alpha_equal(E("tfun(X <: Top) fun(x: X) x"), E("tfun(Y <: Top) fun(z: Y) z")));
  CHECK(alpha_equal(T("forall(X <: Top) X -> X"), T("forall(Y <: Top) Y -> Y")));
  CHECK_FALSE(alpha_equal(E("fun(x: Nat) x"), E("fun(x: Top) x")));
  CHECK_FALSE(alpha_equal(E("fun(x: Nat) x"), E("fun(x: Nat) 5")));
  CHECK_FALSE(alpha_equal(T("{x: Nat}"), T("{y: Nat}")));
}

TEST_CASE("alpha equality distinguishes free variables") {
  CHECK(alpha_equal(E("x"), E("x")));
  CHECK_FALSE(alpha_equal(E("x"), E("y")));
  CHECK_FALSE(alpha_equal(E("fun(x: Nat) y"), E("fun(x: Nat) z")));
}

TEST_CASE("substitution avoids capture") {
  // (fun(y: Top) x)[x := y] must not capture the free y
  TermPtr t = substitute_term(E("fun(y: Top) x"), "x", E("y"));
  CHECK(alpha_equal(t, E("fun(z: Top) y")));
  CHECK(free_term_vars(t).count("y") == 1);
}

TEST_CASE("substitution replaces only free occurrences") {
  TermPtr t = substitute_term(E("fun(x: Nat) x y"), "x", E("5"));
  CHECK(alpha_equal(t, E("fun(x: Nat) x y")));
  TermPtr u = substitute_term(E("x (fun(x: Nat) x)"), "x", E("5"));
  CHECK(alpha_equal(u, E("5 (fun(x: Nat) x)")));
}

TEST_CASE("type substitution in terms rewrites annotations") {
  TermPtr t = substitute_type_in_term(E("fun(x: X) x"), "X", T("Nat"));
  CHECK(alpha_equal(t, E("fun(x: Nat) x")));
  // bound occurrences of the type variable stay put
  TermPtr u = substitute_type_in_term(E("tfun(X <: Top) fun(x: X) x"), "X", T("Nat"));
  CHECK(alpha_equal(u, E("tfun(X <: Top) fun(x: X) x")));
}

TEST_CASE("type substitution avoids capture under foralls") {
  TypePtr t = substitute_type(T("forall(X <: Top) X -> Y"), "Y", T("X"));
  CHECK(alpha_equal(t, T("forall(Z <: Top) Z -> X")));
}

TEST_CASE("values are lambdas, type lambdas, literals, and (sealed) record values") {
  CHECK(is_value(E("fun(x: Nat) x")));
  CHECK(is_value(E("tfun(X <: Top) 5")));
  CHECK(is_value(E("10")));
  TermPtr rv = tm::record_val({{"x", Location{1}}});
  CHECK(is_value(rv));
  CHECK(is_value(tm::seal(rv)));
  // a double seal still has a collapse step to take
  CHECK_FALSE(is_value(tm::seal(tm::seal(rv))));
  CHECK_FALSE(is_value(E("{x = 10}")));
  CHECK_FALSE(is_value(E("seal (fun(x: Nat) x)")));
  CHECK_FALSE(is_value(E("(fun(x: Nat) x) 5")));
  CHECK_FALSE(is_value(E("x")));
}

TEST_CASE("seal_count counts every seal node") {
  CHECK(seal_count(E("5")) == 0);
  CHECK(seal_count(E("seal 5")) == 1);
  CHECK(seal_count(E("seal (seal {x = seal 5})")) == 3);
  CHECK(seal_count(E("(seal x) (seal y)")) == 2);
}

TEST_CASE("seal ordering relates a term to its more-sealed variants") {
  CHECK(seal_leq(E("5"), E("5")));
  CHECK(seal_leq(E("5"), E("seal 5")));
  CHECK(seal_leq(E("5"), E("seal (seal 5)")));
  CHECK_FALSE(seal_leq(E("seal 5"), E("5")));
  CHECK(seal_leq(E("{x = 10}"), E("seal {x = seal 10}")));
  CHECK(seal_leq(E("f x"), E("(seal f) (seal x)")));
  CHECK_FALSE(seal_leq(E("5"), E("seal 6")));
  CHECK(seal_leq(E("fun(x: Nat) x"), E("seal (fun(y: Nat) y)")));
}

TEST_CASE("store ordering requires equal domains and pointwise seal ordering") {
  Store s, t;
  CHECK(store_leq(s, t));
  s.entries[1] = E("5");
  CHECK_FALSE(store_leq(s, t));
  t.entries[1] = E("seal 5");
  CHECK(store_leq(s, t));
  CHECK_FALSE(store_leq(t, s));
  t.entries[2] = E("7");
  CHECK_FALSE(store_leq(s, t));
}

TEST_CASE("free variable computation") {
  CHECK(free_term_vars(E("fun(x: Nat) x y")) == std::set<std::string>{"y"});
  CHECK(free_term_vars(E("x.first := y")) == std::set<std::string>{"x", "y"});
  CHECK(free_type_vars(T("forall(X <: Y) X -> Z")) == std::set<std::string>{"Y", "Z"});
  CHECK(free_type_vars_in_term(E("fun(x: X) tfun(Y <: Top) fun(z: Y) x")) ==
        std::set<std::string>{"X"});
}

TEST_CASE("fresh names avoid the given set") {
  CHECK(fresh_name("x", {}) == "x");
  std::string f = fresh_name("x", {"x"});
  CHECK(f != "x");
  CHECK(fresh_name("x", {"x", f}) != f);
}

TEST_CASE("locations render as fixed-width hex") {
  CHECK(show_location(Location{1}) == "0x0001");
  CHECK(show_location(Location{10}) == "0x000a");
  CHECK(show_location(Location{65535}) == "0xffff");
}

TEST_SUITE_END();
