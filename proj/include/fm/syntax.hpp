#pragma once

// Terms, types, values and stores of the F_M calculus: F<: extended with
// mutable single-field-record intersections, a readonly type operator and
// runtime seals. Everything here is immutable once built and shared via
// shared_ptr, so trees can be reused freely across threads.

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace fm {

// Source position of a node; line/column are 1-based, line == 0 means the
// node was built programmatically and has no position.
struct Span {
  int line = 0;
  int column = 0;
  int length = 0;

  bool valid() const { return line > 0; }
};

// ---------------------------------------------------------------------------
// Types

enum class TypeKind {
  Top,
  Nat,        // opaque base scalar; no operations
  Arrow,      // S -> T
  Forall,     // forall(X <: S) T
  Record,     // {x : T}, single field only
  Intersect,  // S & T
  Readonly,   // readonly T
  Var,        // type variable
};

struct TypeExpr;
using TypePtr = std::shared_ptr<const TypeExpr>;

struct TypeExpr {
  TypeKind kind;
  TypePtr a;         // Arrow domain | Forall bound | Record field | Intersect left | Readonly inner
  TypePtr b;         // Arrow codomain | Forall body | Intersect right
  std::string name;  // Var name | Forall binder | Record label
};

namespace ty {
TypePtr top();
TypePtr nat();
TypePtr arrow(TypePtr domain, TypePtr codomain);
TypePtr forall(std::string binder, TypePtr bound, TypePtr body);
TypePtr record(std::string label, TypePtr field);
TypePtr inter(TypePtr left, TypePtr right);
TypePtr readonly(TypePtr inner);
TypePtr var(std::string name);
}  // namespace ty

// ---------------------------------------------------------------------------
// Terms

enum class TermKind {
  Var,
  Abs,         // fun(x: T) t
  App,         // t1 t2
  TyAbs,       // tfun(X <: T) t
  TyApp,       // t1 [T]
  RecordLit,   // {x = t, ...}; reduces by allocating
  RecordVal,   // {x : l, ...}; runtime-only
  FieldRead,   // t.x
  FieldWrite,  // t.x := s
  Seal,        // seal t
  NatLit,
};

// Store locations are not first-class terms; they appear only inside
// RecordVal nodes. Display form is 0x-prefixed zero-padded hex, matching
// the evaluation traces.
struct Location {
  uint64_t index = 0;

  friend bool operator==(Location a, Location b) { return a.index == b.index; }
  friend bool operator<(Location a, Location b) { return a.index < b.index; }
};

std::string show_location(Location l);

struct TermNode;
using TermPtr = std::shared_ptr<const TermNode>;

struct TermNode {
  TermKind kind;
  std::string name;  // Var name | Abs param | TyAbs binder | field label
  TypePtr type;      // Abs param type | TyAbs bound | TyApp argument
  TermPtr t1;        // App fn | FieldRead/Write target | Seal inner | Abs/TyAbs body
  TermPtr t2;        // App arg | FieldWrite source
  std::vector<std::pair<std::string, TermPtr>> fields;    // RecordLit
  std::vector<std::pair<std::string, Location>> locs;     // RecordVal
  uint64_t nat = 0;  // NatLit
  Span span;
};

namespace tm {
TermPtr var(std::string name, Span span = {});
TermPtr abs(std::string param, TypePtr param_type, TermPtr body, Span span = {});
TermPtr app(TermPtr fn, TermPtr arg, Span span = {});
TermPtr tyabs(std::string binder, TypePtr bound, TermPtr body, Span span = {});
TermPtr tyapp(TermPtr fn, TypePtr type_arg, Span span = {});
TermPtr record_lit(std::vector<std::pair<std::string, TermPtr>> fields, Span span = {});
TermPtr record_val(std::vector<std::pair<std::string, Location>> locs);
TermPtr field_read(TermPtr target, std::string label, Span span = {});
TermPtr field_write(TermPtr target, std::string label, TermPtr source, Span span = {});
TermPtr seal(TermPtr inner, Span span = {});
TermPtr nat_lit(uint64_t value, Span span = {});
}  // namespace tm

// ---------------------------------------------------------------------------
// Stores

// Finite map from locations to stored values. Allocation hands out strictly
// increasing indices starting at 1 and never reuses them.
struct Store {
  std::map<uint64_t, TermPtr> entries;

  bool contains(Location l) const { return entries.count(l.index) != 0; }
  TermPtr get(Location l) const;
  size_t size() const { return entries.size(); }
};

// ---------------------------------------------------------------------------
// Operations

// Values: Abs, TyAbs, NatLit, RecordVal and a single seal over a RecordVal.
// Seal(Abs), Seal(Seal(RecordVal)) and RecordLit all still reduce.
bool is_value(const TermPtr& t);

// |t|: number of Seal constructors in t (not following store locations).
uint64_t seal_count(const TermPtr& t);

// s <= t: t is obtainable from s by wrapping zero or more subterms of s in
// Seal. Compared up to alpha-equivalence.
bool seal_leq(const TermPtr& s, const TermPtr& t);

// Pointwise seal_leq over stores with equal domains.
bool store_leq(const Store& s, const Store& t);

bool alpha_equal(const TypePtr& a, const TypePtr& b);
bool alpha_equal(const TermPtr& a, const TermPtr& b);

// Capture-avoiding substitutions.
TermPtr substitute_term(const TermPtr& body, const std::string& var, const TermPtr& value);
TermPtr substitute_type_in_term(const TermPtr& body, const std::string& tyvar, const TypePtr& ty);
TypePtr substitute_type(const TypePtr& body, const std::string& tyvar, const TypePtr& ty);

std::set<std::string> free_term_vars(const TermPtr& t);
std::set<std::string> free_type_vars(const TypePtr& t);
std::set<std::string> free_type_vars_in_term(const TermPtr& t);

// A name based on `base` that avoids everything in `avoid`.
std::string fresh_name(const std::string& base, const std::set<std::string>& avoid);

}  // namespace fm
