#pragma once

// Static semantics of F_M: type normalization (nf), algorithmic subtyping
// cross-checked by a depth-bounded declarative oracle, and a type checker
// that annotates every subterm with its synthesized type.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fm/parser.hpp"
#include "fm/syntax.hpp"

namespace fm {

// Gamma: ordered term bindings (x : T) and type-variable bounds (X <: T).
struct TypeContext {
  std::vector<std::pair<std::string, TypePtr>> terms;
  std::vector<std::pair<std::string, TypePtr>> tyvars;

  const TypePtr* lookup_term(const std::string& name) const;
  const TypePtr* lookup_tyvar(const std::string& name) const;
  TypeContext with_term(std::string name, TypePtr type) const;
  TypeContext with_tyvar(std::string name, TypePtr bound) const;
};

// Sigma: location types. Extension-only during evaluation.
struct StoreTyping {
  std::map<uint64_t, TypePtr> entries;

  const TypePtr* lookup(Location l) const;
  StoreTyping with(Location l, TypePtr type) const;
  size_t size() const { return entries.size(); }
};

// Normal forms: intersections of Top/Nat/arrow/forall/record components,
// readonly applied only to records and type variables.
bool is_normal(const TypePtr& t);
TypePtr nf(const TypePtr& t);

// readonly is a no-op on T (nf(readonly T) = nf(T)): arrows, foralls,
// scalars, Top and already-readonly types.
bool is_readonly_type(const TypePtr& t);

inline constexpr uint64_t kDefaultSubtypeFuel = 100000;

enum class SubtypeAnswer { Yes, No, OutOfFuel };

// Best-effort algorithmic subtyping, computed on normal forms. OutOfFuel is
// distinct from No; full F<: subtyping is undecidable in general.
SubtypeAnswer subtype(const TypeContext& ctx, const TypePtr& s, const TypePtr& t,
                      uint64_t fuel = kDefaultSubtypeFuel);

enum class OracleAnswer { Proven, NoProofWithinDepth };

// Exhaustive search over the declarative rules bounded by derivation depth.
// Proven always corresponds to a genuine derivation; NoProofWithinDepth is a
// valid answer, not an error.
OracleAnswer subtype_oracle(const TypeContext& ctx, const TypePtr& s, const TypePtr& t,
                            int max_depth);

// ---------------------------------------------------------------------------
// Type checking

// A term where every subterm carries its synthesized type. Children follow
// evaluation positions: Abs/TyAbs/Seal [body], App/FieldWrite [left, right],
// TyApp/FieldRead [target], RecordLit [fields in order].
struct TypedNode;
using TypedPtr = std::shared_ptr<const TypedNode>;

struct TypedNode {
  TermPtr term;
  TypePtr type;
  std::vector<TypedPtr> children;
};

struct TypedTerm {
  TypedPtr root;
  TypePtr judged;  // root type after any final subsumption
};

struct TypecheckResult {
  std::optional<TypedTerm> typed;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return typed.has_value(); }
};

TypecheckResult typecheck(const TypeContext& ctx, const StoreTyping& sigma, const TermPtr& t);

// A field looked up in a normal-form type, widening type variables through
// their bounds. A hit found under a readonly layer is flagged; when a label
// is reachable both ways, the mutable hit wins.
struct FieldHit {
  bool readonly_view = false;
  TypePtr type;
};
std::optional<FieldHit> expose_field(const TypeContext& ctx, const TypePtr& t,
                                     const std::string& label, int guard = 64);

// All arrow (resp. quantified) components reachable from a normal-form type
// through intersections and variable bounds; elimination rules try them in
// order.
void collect_arrows(const TypeContext& ctx, const TypePtr& t, std::vector<TypePtr>& out,
                    int guard = 64);
void collect_foralls(const TypeContext& ctx, const TypePtr& t, std::vector<TypePtr>& out,
                     int guard = 64);

struct StoreCheckResult {
  bool ok = false;
  std::vector<Diagnostic> diagnostics;
};

// Domains of sigma and the store coincide and every stored value checks
// against its assigned type.
StoreCheckResult check_store(const TypeContext& ctx, const StoreTyping& sigma, const Store& store);

}  // namespace fm
