#include "fm/typesys.hpp"

#include <set>
#include <unordered_map>
#include <utility>

namespace fm {

const TypePtr* TypeContext::lookup_term(const std::string& name) const {
  for (auto it = terms.rbegin(); it != terms.rend(); ++it)
    if (it->first == name) return &it->second;
  return nullptr;
}

const TypePtr* TypeContext::lookup_tyvar(const std::string& name) const {
  for (auto it = tyvars.rbegin(); it != tyvars.rend(); ++it)
    if (it->first == name) return &it->second;
  return nullptr;
}

TypeContext TypeContext::with_term(std::string name, TypePtr type) const {
  TypeContext out = *this;
  out.terms.emplace_back(std::move(name), std::move(type));
  return out;
}

TypeContext TypeContext::with_tyvar(std::string name, TypePtr bound) const {
  TypeContext out = *this;
  out.tyvars.emplace_back(std::move(name), std::move(bound));
  return out;
}

const TypePtr* StoreTyping::lookup(Location l) const {
  auto it = entries.find(l.index);
  return it == entries.end() ? nullptr : &it->second;
}

StoreTyping StoreTyping::with(Location l, TypePtr type) const {
  StoreTyping out = *this;
  out.entries[l.index] = std::move(type);
  return out;
}

// ---------------------------------------------------------------------------
// Normal forms

namespace {

// readonly pushed into an already-normal type: erased on arrows, foralls,
// scalars and Top, distributed over intersections, kept on records and
// variables, absorbed by an existing readonly.
TypePtr ro_of_normal(const TypePtr& t) {
  switch (t->kind) {
    case TypeKind::Top:
    case TypeKind::Nat:
    case TypeKind::Arrow:
    case TypeKind::Forall:
    case TypeKind::Readonly:
      return t;
    case TypeKind::Intersect:
      return ty::inter(ro_of_normal(t->a), ro_of_normal(t->b));
    case TypeKind::Record:
    case TypeKind::Var:
      return ty::readonly(t);
  }
  return t;
}

}  // namespace

bool is_normal(const TypePtr& t) {
  switch (t->kind) {
    case TypeKind::Top:
    case TypeKind::Nat:
    case TypeKind::Var:
      return true;
    case TypeKind::Arrow:
    case TypeKind::Forall:
    case TypeKind::Intersect:
      return is_normal(t->a) && is_normal(t->b);
    case TypeKind::Record:
      return is_normal(t->a);
    case TypeKind::Readonly:
      if (t->a->kind == TypeKind::Var) return true;
      if (t->a->kind == TypeKind::Record) return is_normal(t->a->a);
      return false;
  }
  return false;
}

TypePtr nf(const TypePtr& t) {
  switch (t->kind) {
    case TypeKind::Top:
    case TypeKind::Nat:
    case TypeKind::Var:
      return t;
    case TypeKind::Arrow:
      return ty::arrow(nf(t->a), nf(t->b));
    case TypeKind::Forall:
      return ty::forall(t->name, nf(t->a), nf(t->b));
    case TypeKind::Record:
      return ty::record(t->name, nf(t->a));
    case TypeKind::Intersect:
      return ty::inter(nf(t->a), nf(t->b));
    case TypeKind::Readonly:
      return ro_of_normal(nf(t->a));
  }
  return t;
}

bool is_readonly_type(const TypePtr& t) {
  TypePtr n = nf(t);
  return alpha_equal(ro_of_normal(n), n);
}

// ---------------------------------------------------------------------------
// Algorithmic subtyping

namespace {

using SA = SubtypeAnswer;

class SubtypeEngine {
 public:
  explicit SubtypeEngine(uint64_t fuel) : fuel_(fuel) {}

  SA run(const TypeContext& ctx, const TypePtr& s, const TypePtr& t) {
    return sub(ctx, nf(s), nf(t));
  }

 private:
  uint64_t fuel_;

  template <class F1, class F2>
  static SA both(F1&& f1, F2&& f2) {
    SA a = f1();
    if (a == SA::No) return SA::No;
    SA b = f2();
    if (b == SA::No) return SA::No;
    return (a == SA::OutOfFuel || b == SA::OutOfFuel) ? SA::OutOfFuel : SA::Yes;
  }

  template <class F1, class F2>
  static SA either(F1&& f1, F2&& f2) {
    SA a = f1();
    if (a == SA::Yes) return SA::Yes;
    SA b = f2();
    if (b == SA::Yes) return SA::Yes;
    return (a == SA::OutOfFuel || b == SA::OutOfFuel) ? SA::OutOfFuel : SA::No;
  }

  SA fields_equal(const TypeContext& ctx, const TypePtr& s, const TypePtr& t) {
    return both([&] { return sub(ctx, s, t); }, [&] { return sub(ctx, t, s); });
  }

  // Widen the left side through a variable bound (or a readonly view of one).
  SA chase(const TypeContext& ctx, const TypePtr& s, const TypePtr& t) {
    if (s->kind == TypeKind::Var) {
      const TypePtr* b = ctx.lookup_tyvar(s->name);
      if (!b) return SA::No;
      return sub(ctx, nf(*b), t);
    }
    if (s->kind == TypeKind::Readonly && s->a->kind == TypeKind::Var) {
      const TypePtr* b = ctx.lookup_tyvar(s->a->name);
      if (!b) return SA::No;
      return sub(ctx, ro_of_normal(nf(*b)), t);
    }
    return SA::No;
  }

  // s and t are in normal form.
  SA sub(const TypeContext& ctx, const TypePtr& s, const TypePtr& t) {
    if (fuel_ == 0) return SA::OutOfFuel;
    --fuel_;

    if (t->kind == TypeKind::Top) return SA::Yes;
    if (alpha_equal(s, t)) return SA::Yes;
    if (t->kind == TypeKind::Intersect)
      return both([&] { return sub(ctx, s, t->a); }, [&] { return sub(ctx, s, t->b); });
    if (s->kind == TypeKind::Intersect)
      return either([&] { return sub(ctx, s->a, t); }, [&] { return sub(ctx, s->b, t); });

    switch (t->kind) {
      case TypeKind::Nat:
      case TypeKind::Var:
        return chase(ctx, s, t);
      case TypeKind::Arrow:
        if (s->kind == TypeKind::Arrow)
          return both([&] { return sub(ctx, t->a, s->a); },
                      [&] { return sub(ctx, s->b, t->b); });
        return chase(ctx, s, t);
      case TypeKind::Forall: {
        if (s->kind != TypeKind::Forall) return chase(ctx, s, t);
        return both(
            [&] { return sub(ctx, t->a, s->a); },
            [&] {
              std::set<std::string> avoid = free_type_vars(s->b);
              std::set<std::string> more = free_type_vars(t->b);
              avoid.insert(more.begin(), more.end());
              for (const auto& [n, b] : ctx.tyvars) avoid.insert(n);
              std::string x = fresh_name(s->name, avoid);
              TypePtr v = ty::var(x);
              return sub(ctx.with_tyvar(x, t->a), substitute_type(s->b, s->name, v),
                         substitute_type(t->b, t->name, v));
            });
      }
      case TypeKind::Record:
        if (s->kind == TypeKind::Record && s->name == t->name)
          return fields_equal(ctx, s->a, t->a);
        return chase(ctx, s, t);
      case TypeKind::Readonly: {
        const TypePtr& u = t->a;  // record or variable, by normality
        if (s->kind == TypeKind::Record && u->kind == TypeKind::Record && s->name == u->name)
          return fields_equal(ctx, s->a, u->a);
        if (s->kind == TypeKind::Readonly) {
          const TypePtr& v = s->a;
          if (v->kind == TypeKind::Record && u->kind == TypeKind::Record && v->name == u->name)
            return fields_equal(ctx, v->a, u->a);
          return chase(ctx, s, t);
        }
        if (s->kind == TypeKind::Var)
          return either([&] { return sub(ctx, s, u); }, [&] { return chase(ctx, s, t); });
        return SA::No;
      }
      default:
        return SA::No;
    }
  }
};

}  // namespace

SubtypeAnswer subtype(const TypeContext& ctx, const TypePtr& s, const TypePtr& t, uint64_t fuel) {
  return SubtypeEngine(fuel).run(ctx, s, t);
}

// ---------------------------------------------------------------------------
// Declarative oracle

namespace {

class OracleSearch {
 public:
  bool rec(const TypeContext& ctx, const TypePtr& s, const TypePtr& t, int depth) {
    if (depth <= 0) return false;
    if (alpha_equal(s, t)) return true;        // reflexivity
    if (t->kind == TypeKind::Top) return true;
    // mutable-to-readonly axiom: S <= readonly S
    if (t->kind == TypeKind::Readonly && alpha_equal(s, t->a)) return true;
    // idempotence axiom: readonly readonly U <= readonly U
    if (s->kind == TypeKind::Readonly && s->a->kind == TypeKind::Readonly &&
        t->kind == TypeKind::Readonly && alpha_equal(s->a->a, t->a))
      return true;

    std::string k = key(ctx, s, t, depth);
    auto it = memo_.find(k);
    if (it != memo_.end()) return it->second;
    bool ok = search(ctx, s, t, depth);
    memo_[k] = ok;
    return ok;
  }

 private:
  std::unordered_map<std::string, bool> memo_;

  static std::string key(const TypeContext& ctx, const TypePtr& s, const TypePtr& t, int depth) {
    std::string k;
    for (const auto& [n, b] : ctx.tyvars) {
      k += n;
      k += "<:";
      k += pretty_type(b);
      k += ';';
    }
    k += '\x1f';
    k += pretty_type(s);
    k += '\x1f';
    k += pretty_type(t);
    k += '\x1f';
    k += std::to_string(depth);
    return k;
  }

  bool search(const TypeContext& ctx, const TypePtr& s, const TypePtr& t, int depth) {
    const int d = depth - 1;

    // variable bound widening
    if (s->kind == TypeKind::Var) {
      const TypePtr* b = ctx.lookup_tyvar(s->name);
      if (b && rec(ctx, *b, t, d)) return true;
    }
    // arrow: contravariant domain, covariant codomain
    if (s->kind == TypeKind::Arrow && t->kind == TypeKind::Arrow && rec(ctx, t->a, s->a, d) &&
        rec(ctx, s->b, t->b, d))
      return true;
    // forall: contravariant bounds, bodies under the tighter bound
    if (s->kind == TypeKind::Forall && t->kind == TypeKind::Forall && rec(ctx, t->a, s->a, d)) {
      std::set<std::string> avoid = free_type_vars(s->b);
      std::set<std::string> more = free_type_vars(t->b);
      avoid.insert(more.begin(), more.end());
      for (const auto& [n, b] : ctx.tyvars) avoid.insert(n);
      std::string x = fresh_name(s->name, avoid);
      TypePtr v = ty::var(x);
      if (rec(ctx.with_tyvar(x, t->a), substitute_type(s->b, s->name, v),
              substitute_type(t->b, t->name, v), d))
        return true;
    }
    // intersection introduction on the right
    if (t->kind == TypeKind::Intersect && rec(ctx, s, t->a, d) && rec(ctx, s, t->b, d))
      return true;
    // intersection elimination on the left
    if (s->kind == TypeKind::Intersect && (rec(ctx, s->a, t, d) || rec(ctx, s->b, t, d)))
      return true;
    // records: same label, fields equivalent in both directions
    if (s->kind == TypeKind::Record && t->kind == TypeKind::Record && s->name == t->name &&
        rec(ctx, s->a, t->a, d) && rec(ctx, t->a, s->a, d))
      return true;
    // readonly is monotone
    if (s->kind == TypeKind::Readonly && t->kind == TypeKind::Readonly &&
        rec(ctx, s->a, t->a, d))
      return true;
    // rewrite both sides to normal form
    TypePtr ns = nf(s);
    TypePtr nt = nf(t);
    if ((!alpha_equal(ns, s) || !alpha_equal(nt, t)) && rec(ctx, ns, nt, d)) return true;
    // transitivity through a small set of sound intermediates
    for (const TypePtr& u : candidates(ctx, s, t)) {
      if (alpha_equal(u, s) || alpha_equal(u, t)) continue;
      if (rec(ctx, s, u, d) && rec(ctx, u, t, d)) return true;
    }
    return false;
  }

  static std::vector<TypePtr> candidates(const TypeContext& ctx, const TypePtr& s,
                                         const TypePtr& t) {
    std::vector<TypePtr> out;
    out.push_back(ty::readonly(s));
    out.push_back(ty::readonly(t));
    out.push_back(nf(s));
    out.push_back(nf(t));
    if (s->kind == TypeKind::Readonly) out.push_back(s->a);
    if (t->kind == TypeKind::Readonly) out.push_back(t->a);
    if (s->kind == TypeKind::Var) {
      if (const TypePtr* b = ctx.lookup_tyvar(s->name)) out.push_back(*b);
    }
    if (s->kind == TypeKind::Readonly && s->a->kind == TypeKind::Var) {
      if (const TypePtr* b = ctx.lookup_tyvar(s->a->name)) {
        out.push_back(ty::readonly(*b));
        out.push_back(ro_of_normal(nf(*b)));
      }
    }
    if (s->kind == TypeKind::Intersect) {
      out.push_back(s->a);
      out.push_back(s->b);
    }
    if (t->kind == TypeKind::Intersect) {
      out.push_back(t->a);
      out.push_back(t->b);
    }
    return out;
  }
};

}  // namespace

OracleAnswer subtype_oracle(const TypeContext& ctx, const TypePtr& s, const TypePtr& t,
                            int max_depth) {
  OracleSearch search;
  return search.rec(ctx, s, t, max_depth) ? OracleAnswer::Proven
                                          : OracleAnswer::NoProofWithinDepth;
}

// ---------------------------------------------------------------------------
// Elimination viewpoints

std::optional<FieldHit> expose_field(const TypeContext& ctx, const TypePtr& t,
                                     const std::string& label, int guard) {
  if (guard <= 0) return std::nullopt;
  switch (t->kind) {
    case TypeKind::Intersect: {
      auto l = expose_field(ctx, t->a, label, guard - 1);
      auto r = expose_field(ctx, t->b, label, guard - 1);
      if (l && !l->readonly_view) return l;
      if (r && !r->readonly_view) return r;
      return l ? l : r;
    }
    case TypeKind::Record:
      if (t->name == label) return FieldHit{false, t->a};
      return std::nullopt;
    case TypeKind::Var: {
      const TypePtr* b = ctx.lookup_tyvar(t->name);
      if (!b) return std::nullopt;
      return expose_field(ctx, nf(*b), label, guard - 1);
    }
    case TypeKind::Readonly: {
      const TypePtr& u = t->a;
      if (u->kind == TypeKind::Record) {
        if (u->name == label) return FieldHit{true, u->a};
        return std::nullopt;
      }
      if (u->kind == TypeKind::Var) {
        const TypePtr* b = ctx.lookup_tyvar(u->name);
        if (!b) return std::nullopt;
        return expose_field(ctx, ro_of_normal(nf(*b)), label, guard - 1);
      }
      return std::nullopt;
    }
    default:
      return std::nullopt;
  }
}

void collect_arrows(const TypeContext& ctx, const TypePtr& t, std::vector<TypePtr>& out,
                    int guard) {
  if (guard <= 0) return;
  switch (t->kind) {
    case TypeKind::Arrow:
      out.push_back(t);
      return;
    case TypeKind::Intersect:
      collect_arrows(ctx, t->a, out, guard - 1);
      collect_arrows(ctx, t->b, out, guard - 1);
      return;
    case TypeKind::Var:
      if (const TypePtr* b = ctx.lookup_tyvar(t->name))
        collect_arrows(ctx, nf(*b), out, guard - 1);
      return;
    case TypeKind::Readonly:
      if (t->a->kind == TypeKind::Var)
        if (const TypePtr* b = ctx.lookup_tyvar(t->a->name))
          collect_arrows(ctx, ro_of_normal(nf(*b)), out, guard - 1);
      return;
    default:
      return;
  }
}

void collect_foralls(const TypeContext& ctx, const TypePtr& t, std::vector<TypePtr>& out,
                     int guard) {
  if (guard <= 0) return;
  switch (t->kind) {
    case TypeKind::Forall:
      out.push_back(t);
      return;
    case TypeKind::Intersect:
      collect_foralls(ctx, t->a, out, guard - 1);
      collect_foralls(ctx, t->b, out, guard - 1);
      return;
    case TypeKind::Var:
      if (const TypePtr* b = ctx.lookup_tyvar(t->name))
        collect_foralls(ctx, nf(*b), out, guard - 1);
      return;
    case TypeKind::Readonly:
      if (t->a->kind == TypeKind::Var)
        if (const TypePtr* b = ctx.lookup_tyvar(t->a->name))
          collect_foralls(ctx, ro_of_normal(nf(*b)), out, guard - 1);
      return;
    default:
      return;
  }
}

// ---------------------------------------------------------------------------
// Type checking

namespace {

struct TypeError {
  Diagnostic diag;
};

[[noreturn]] void type_fail(Span span, std::string message, std::string rule,
                            const TypePtr& expected = nullptr, const TypePtr& actual = nullptr) {
  Diagnostic d;
  d.span = span;
  d.severity = Severity::Error;
  d.message = std::move(message);
  d.rule = std::move(rule);
  if (expected) d.expected_type = pretty_type(expected);
  if (actual) d.actual_type = pretty_type(actual);
  throw TypeError{std::move(d)};
}

class Checker {
 public:
  explicit Checker(const StoreTyping& sigma) : sigma_(sigma) {}

  TypedPtr synth(const TypeContext& ctx, const TermPtr& t);

 private:
  const StoreTyping& sigma_;

  static TypedPtr node(TermPtr term, TypePtr type, std::vector<TypedPtr> children = {}) {
    auto n = std::make_shared<TypedNode>();
    n->term = std::move(term);
    n->type = std::move(type);
    n->children = std::move(children);
    return n;
  }

  static void require_wellscoped(const TypeContext& ctx, const TypePtr& type, Span span) {
    for (const std::string& x : free_type_vars(type))
      if (!ctx.lookup_tyvar(x))
        type_fail(span, "unbound type variable '" + x + "'", "unbound-type-variable");
  }

  bool fits(const TypeContext& ctx, const TypePtr& s, const TypePtr& t, Span span) {
    switch (subtype(ctx, s, t)) {
      case SubtypeAnswer::Yes:
        return true;
      case SubtypeAnswer::No:
        return false;
      case SubtypeAnswer::OutOfFuel:
        type_fail(span, "subtype check ran out of fuel", "subtype-fuel-exhausted", t, s);
    }
    return false;
  }

};

TypedPtr Checker::synth(const TypeContext& ctx, const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Var: {
      const TypePtr* ty = ctx.lookup_term(t->name);
      if (!ty) type_fail(t->span, "unbound variable '" + t->name + "'", "unbound-variable");
      return node(t, *ty);
    }
    case TermKind::NatLit:
      return node(t, ty::nat());
    case TermKind::Abs: {
      require_wellscoped(ctx, t->type, t->span);
      TypedPtr body = synth(ctx.with_term(t->name, t->type), t->t1);
      return node(t, ty::arrow(t->type, body->type), {body});
    }
    case TermKind::TyAbs: {
      require_wellscoped(ctx, t->type, t->span);
      // rename on shadowing so later bound lookups stay lexically correct
      std::string binder = t->name;
      TermPtr self = t;
      if (ctx.lookup_tyvar(binder)) {
        std::set<std::string> avoid = free_type_vars_in_term(t->t1);
        for (const auto& [n, b] : ctx.tyvars) avoid.insert(n);
        binder = fresh_name(binder, avoid);
        TermPtr body_term = substitute_type_in_term(t->t1, t->name, ty::var(binder));
        self = tm::tyabs(binder, t->type, body_term, t->span);
      }
      TypedPtr body = synth(ctx.with_tyvar(binder, t->type), self->t1);
      return node(self, ty::forall(binder, t->type, body->type), {body});
    }
    case TermKind::App: {
      TypedPtr fn = synth(ctx, t->t1);
      TypedPtr arg = synth(ctx, t->t2);
      std::vector<TypePtr> arrows;
      collect_arrows(ctx, nf(fn->type), arrows);
      if (arrows.empty())
        type_fail(t->t1->span.valid() ? t->t1->span : t->span,
                  "expected a function, found " + pretty_type(fn->type), "not-a-function");
      for (const TypePtr& a : arrows)
        if (fits(ctx, arg->type, a->a, t->span)) return node(t, a->b, {fn, arg});
      Span sp = t->t2->span.valid() ? t->t2->span : t->span;
      type_fail(sp, "argument type does not match the function's domain",
                "argument-type-mismatch", arrows.front()->a, arg->type);
    }
    case TermKind::TyApp: {
      TypedPtr fn = synth(ctx, t->t1);
      require_wellscoped(ctx, t->type, t->span);
      std::vector<TypePtr> foralls;
      collect_foralls(ctx, nf(fn->type), foralls);
      if (foralls.empty())
        type_fail(t->t1->span.valid() ? t->t1->span : t->span,
                  "expected a type abstraction, found " + pretty_type(fn->type),
                  "not-a-type-abstraction");
      for (const TypePtr& f : foralls)
        if (fits(ctx, t->type, f->a, t->span))
          return node(t, substitute_type(f->b, f->name, t->type), {fn});
      type_fail(t->span, "type argument does not satisfy the bound", "type-argument-mismatch",
                foralls.front()->a, t->type);
    }
    case TermKind::RecordLit: {
      std::set<std::string> seen;
      std::vector<TypedPtr> children;
      TypePtr ty_acc;
      for (const auto& [label, sub] : t->fields) {
        if (!seen.insert(label).second)
          type_fail(t->span, "duplicate field label '" + label + "'", "duplicate-label");
        TypedPtr c = synth(ctx, sub);
        TypePtr one = ty::record(label, c->type);
        ty_acc = ty_acc ? ty::inter(ty_acc, one) : one;
        children.push_back(std::move(c));
      }
      if (!ty_acc)
        type_fail(t->span, "record literal has no fields", "empty-record");
      return node(t, ty_acc, std::move(children));
    }
    case TermKind::RecordVal: {
      TypePtr ty_acc;
      for (const auto& [label, loc] : t->locs) {
        const TypePtr* lt = sigma_.lookup(loc);
        if (!lt)
          type_fail(t->span, "location " + show_location(loc) + " has no assigned type",
                    "unknown-location");
        TypePtr one = ty::record(label, *lt);
        ty_acc = ty_acc ? ty::inter(ty_acc, one) : one;
      }
      if (!ty_acc)
        type_fail(t->span, "record value has no fields", "empty-record");
      return node(t, ty_acc);
    }
    case TermKind::FieldRead: {
      TypedPtr target = synth(ctx, t->t1);
      auto hit = expose_field(ctx, nf(target->type), t->name);
      if (!hit)
        type_fail(t->span, "no field '" + t->name + "' in type " + pretty_type(target->type),
                  "field-not-present");
      return node(t, hit->readonly_view ? ty::readonly(hit->type) : hit->type, {target});
    }
    case TermKind::FieldWrite: {
      TypedPtr target = synth(ctx, t->t1);
      TypedPtr src = synth(ctx, t->t2);
      auto hit = expose_field(ctx, nf(target->type), t->name);
      if (!hit)
        type_fail(t->span, "no field '" + t->name + "' in type " + pretty_type(target->type),
                  "field-not-present");
      if (hit->readonly_view)
        type_fail(t->span, "cannot write field '" + t->name + "' through a readonly reference",
                  "write-through-readonly", ty::record(t->name, hit->type), target->type);
      if (!fits(ctx, src->type, hit->type, t->t2->span.valid() ? t->t2->span : t->span))
        type_fail(t->t2->span.valid() ? t->t2->span : t->span,
                  "assigned value does not match the field's type", "field-type-mismatch",
                  hit->type, src->type);
      return node(t, hit->type, {target, src});
    }
    case TermKind::Seal: {
      TypedPtr inner = synth(ctx, t->t1);
      return node(t, ty::readonly(inner->type), {inner});
    }
  }
  type_fail(t->span, "unrecognized term form", "internal");
}

}  // namespace

TypecheckResult typecheck(const TypeContext& ctx, const StoreTyping& sigma, const TermPtr& t) {
  TypecheckResult out;
  try {
    Checker checker(sigma);
    TypedPtr root = checker.synth(ctx, t);
    out.typed = TypedTerm{root, root->type};
  } catch (const TypeError& e) {
    out.diagnostics.push_back(e.diag);
  }
  return out;
}

StoreCheckResult check_store(const TypeContext& ctx, const StoreTyping& sigma,
                             const Store& store) {
  StoreCheckResult out;
  for (const auto& [l, ty] : sigma.entries)
    if (!store.contains(Location{l})) {
      Diagnostic d;
      d.severity = Severity::Error;
      d.message = "store has no entry for typed location " + show_location(Location{l});
      d.rule = "store-domain-mismatch";
      out.diagnostics.push_back(std::move(d));
    }
  for (const auto& [l, value] : store.entries) {
    if (!sigma.entries.count(l)) {
      Diagnostic d;
      d.severity = Severity::Error;
      d.message = "no type assigned to location " + show_location(Location{l});
      d.rule = "store-domain-mismatch";
      out.diagnostics.push_back(std::move(d));
      continue;
    }
    TypecheckResult r = typecheck(ctx, sigma, value);
    if (!r.ok()) {
      for (Diagnostic d : r.diagnostics) {
        d.message = "at " + show_location(Location{l}) + ": " + d.message;
        out.diagnostics.push_back(std::move(d));
      }
      continue;
    }
    TypePtr want = sigma.entries.at(l);
    SubtypeAnswer a = subtype(ctx, r.typed->judged, want);
    if (a != SubtypeAnswer::Yes) {
      Diagnostic d;
      d.severity = Severity::Error;
      d.message = "stored value at " + show_location(Location{l}) +
                  (a == SubtypeAnswer::OutOfFuel ? " could not be checked within fuel"
                                                 : " does not match its assigned type");
      d.rule = a == SubtypeAnswer::OutOfFuel ? "subtype-fuel-exhausted" : "store-value-mismatch";
      d.expected_type = pretty_type(want);
      d.actual_type = pretty_type(r.typed->judged);
      out.diagnostics.push_back(std::move(d));
    }
  }
  out.ok = out.diagnostics.empty();
  return out;
}

}  // namespace fm
