#include "fm/syntax.hpp"

#include <algorithm>
#include <cstdio>

namespace fm {

namespace ty {

static TypePtr make(TypeKind k, TypePtr a, TypePtr b, std::string name) {
  auto n = std::make_shared<TypeExpr>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  n->name = std::move(name);
  return n;
}

TypePtr top() {
  static const TypePtr t = make(TypeKind::Top, nullptr, nullptr, "");
  return t;
}
TypePtr nat() {
  static const TypePtr t = make(TypeKind::Nat, nullptr, nullptr, "");
  return t;
}
TypePtr arrow(TypePtr domain, TypePtr codomain) {
  return make(TypeKind::Arrow, std::move(domain), std::move(codomain), "");
}
TypePtr forall(std::string binder, TypePtr bound, TypePtr body) {
  return make(TypeKind::Forall, std::move(bound), std::move(body), std::move(binder));
}
TypePtr record(std::string label, TypePtr field) {
  return make(TypeKind::Record, std::move(field), nullptr, std::move(label));
}
TypePtr inter(TypePtr left, TypePtr right) {
  return make(TypeKind::Intersect, std::move(left), std::move(right), "");
}
TypePtr readonly(TypePtr inner) {
  return make(TypeKind::Readonly, std::move(inner), nullptr, "");
}
TypePtr var(std::string name) {
  return make(TypeKind::Var, nullptr, nullptr, std::move(name));
}

}  // namespace ty

namespace tm {

TermPtr var(std::string name, Span span) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::Var;
  n->name = std::move(name);
  n->span = span;
  return n;
}
TermPtr abs(std::string param, TypePtr param_type, TermPtr body, Span span) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::Abs;
  n->name = std::move(param);
  n->type = std::move(param_type);
  n->t1 = std::move(body);
  n->span = span;
  return n;
}
TermPtr app(TermPtr fn, TermPtr arg, Span span) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::App;
  n->t1 = std::move(fn);
  n->t2 = std::move(arg);
  n->span = span;
  return n;
}
TermPtr tyabs(std::string binder, TypePtr bound, TermPtr body, Span span) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::TyAbs;
  n->name = std::move(binder);
  n->type = std::move(bound);
  n->t1 = std::move(body);
  n->span = span;
  return n;
}
TermPtr tyapp(TermPtr fn, TypePtr type_arg, Span span) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::TyApp;
  n->t1 = std::move(fn);
  n->type = std::move(type_arg);
  n->span = span;
  return n;
}
TermPtr record_lit(std::vector<std::pair<std::string, TermPtr>> fields, Span span) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::RecordLit;
  n->fields = std::move(fields);
  n->span = span;
  return n;
}
TermPtr record_val(std::vector<std::pair<std::string, Location>> locs) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::RecordVal;
  n->locs = std::move(locs);
  return n;
}
TermPtr field_read(TermPtr target, std::string label, Span span) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::FieldRead;
  n->t1 = std::move(target);
  n->name = std::move(label);
  n->span = span;
  return n;
}
TermPtr field_write(TermPtr target, std::string label, TermPtr source, Span span) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::FieldWrite;
  n->t1 = std::move(target);
  n->t2 = std::move(source);
  n->name = std::move(label);
  n->span = span;
  return n;
}
TermPtr seal(TermPtr inner, Span span) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::Seal;
  n->t1 = std::move(inner);
  n->span = span;
  return n;
}
TermPtr nat_lit(uint64_t value, Span span) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::NatLit;
  n->nat = value;
  n->span = span;
  return n;
}

}  // namespace tm

std::string show_location(Location l) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "0x%04llx", static_cast<unsigned long long>(l.index));
  return buf;
}

TermPtr Store::get(Location l) const {
  auto it = entries.find(l.index);
  return it == entries.end() ? nullptr : it->second;
}

bool is_value(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Abs:
    case TermKind::TyAbs:
    case TermKind::NatLit:
    case TermKind::RecordVal:
      return true;
    case TermKind::Seal:
      return t->t1->kind == TermKind::RecordVal;
    default:
      return false;
  }
}

uint64_t seal_count(const TermPtr& t) {
  uint64_t n = t->kind == TermKind::Seal ? 1 : 0;
  if (t->t1) n += seal_count(t->t1);
  if (t->t2) n += seal_count(t->t2);
  for (const auto& [label, field] : t->fields) n += seal_count(field);
  return n;
}

// ---------------------------------------------------------------------------
// Alpha-aware structural comparison.
//
// Binder correspondences are kept as parallel stacks; a bound name matches
// when both sides were bound at the same position, a free name matches by
// spelling.

namespace {

struct NamePairs {
  std::vector<std::pair<std::string, std::string>> pairs;

  // -1 when the name is free on that side.
  int find_left(const std::string& n) const {
    for (int i = static_cast<int>(pairs.size()) - 1; i >= 0; --i)
      if (pairs[i].first == n) return i;
    return -1;
  }
  int find_right(const std::string& n) const {
    for (int i = static_cast<int>(pairs.size()) - 1; i >= 0; --i)
      if (pairs[i].second == n) return i;
    return -1;
  }
  bool matches(const std::string& a, const std::string& b) const {
    int i = find_left(a);
    int j = find_right(b);
    if (i < 0 && j < 0) return a == b;
    return i == j;
  }
};

bool type_alpha_eq(const TypePtr& a, const TypePtr& b, NamePairs& tys) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case TypeKind::Top:
    case TypeKind::Nat:
      return true;
    case TypeKind::Var:
      return tys.matches(a->name, b->name);
    case TypeKind::Arrow:
    case TypeKind::Intersect:
      return type_alpha_eq(a->a, b->a, tys) && type_alpha_eq(a->b, b->b, tys);
    case TypeKind::Record:
      return a->name == b->name && type_alpha_eq(a->a, b->a, tys);
    case TypeKind::Readonly:
      return type_alpha_eq(a->a, b->a, tys);
    case TypeKind::Forall: {
      if (!type_alpha_eq(a->a, b->a, tys)) return false;
      tys.pairs.emplace_back(a->name, b->name);
      bool ok = type_alpha_eq(a->b, b->b, tys);
      tys.pairs.pop_back();
      return ok;
    }
  }
  return false;
}

bool term_alpha_eq(const TermPtr& a, const TermPtr& b, NamePairs& tms, NamePairs& tys) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case TermKind::Var:
      return tms.matches(a->name, b->name);
    case TermKind::NatLit:
      return a->nat == b->nat;
    case TermKind::Abs: {
      if (!type_alpha_eq(a->type, b->type, tys)) return false;
      tms.pairs.emplace_back(a->name, b->name);
      bool ok = term_alpha_eq(a->t1, b->t1, tms, tys);
      tms.pairs.pop_back();
      return ok;
    }
    case TermKind::TyAbs: {
      if (!type_alpha_eq(a->type, b->type, tys)) return false;
      tys.pairs.emplace_back(a->name, b->name);
      bool ok = term_alpha_eq(a->t1, b->t1, tms, tys);
      tys.pairs.pop_back();
      return ok;
    }
    case TermKind::App:
      return term_alpha_eq(a->t1, b->t1, tms, tys) && term_alpha_eq(a->t2, b->t2, tms, tys);
    case TermKind::TyApp:
      return term_alpha_eq(a->t1, b->t1, tms, tys) && type_alpha_eq(a->type, b->type, tys);
    case TermKind::RecordLit: {
      if (a->fields.size() != b->fields.size()) return false;
      for (size_t i = 0; i < a->fields.size(); ++i) {
        if (a->fields[i].first != b->fields[i].first) return false;
        if (!term_alpha_eq(a->fields[i].second, b->fields[i].second, tms, tys)) return false;
      }
      return true;
    }
    case TermKind::RecordVal:
      return a->locs == b->locs;
    case TermKind::FieldRead:
      return a->name == b->name && term_alpha_eq(a->t1, b->t1, tms, tys);
    case TermKind::FieldWrite:
      return a->name == b->name && term_alpha_eq(a->t1, b->t1, tms, tys) &&
             term_alpha_eq(a->t2, b->t2, tms, tys);
    case TermKind::Seal:
      return term_alpha_eq(a->t1, b->t1, tms, tys);
  }
  return false;
}

// s <= t: t may carry extra Seal layers at any position.
bool seal_leq_rec(const TermPtr& s, const TermPtr& t, NamePairs& tms, NamePairs& tys) {
  if (t->kind == TermKind::Seal) {
    if (s->kind == TermKind::Seal && seal_leq_rec(s->t1, t->t1, tms, tys)) return true;
    return seal_leq_rec(s, t->t1, tms, tys);
  }
  if (s->kind != t->kind) return false;
  switch (s->kind) {
    case TermKind::Var:
      return tms.matches(s->name, t->name);
    case TermKind::NatLit:
      return s->nat == t->nat;
    case TermKind::Abs: {
      if (!type_alpha_eq(s->type, t->type, tys)) return false;
      tms.pairs.emplace_back(s->name, t->name);
      bool ok = seal_leq_rec(s->t1, t->t1, tms, tys);
      tms.pairs.pop_back();
      return ok;
    }
    case TermKind::TyAbs: {
      if (!type_alpha_eq(s->type, t->type, tys)) return false;
      tys.pairs.emplace_back(s->name, t->name);
      bool ok = seal_leq_rec(s->t1, t->t1, tms, tys);
      tys.pairs.pop_back();
      return ok;
    }
    case TermKind::App:
      return seal_leq_rec(s->t1, t->t1, tms, tys) && seal_leq_rec(s->t2, t->t2, tms, tys);
    case TermKind::TyApp:
      return seal_leq_rec(s->t1, t->t1, tms, tys) && type_alpha_eq(s->type, t->type, tys);
    case TermKind::RecordLit: {
      if (s->fields.size() != t->fields.size()) return false;
      for (size_t i = 0; i < s->fields.size(); ++i) {
        if (s->fields[i].first != t->fields[i].first) return false;
        if (!seal_leq_rec(s->fields[i].second, t->fields[i].second, tms, tys)) return false;
      }
      return true;
    }
    case TermKind::RecordVal:
      return s->locs == t->locs;
    case TermKind::FieldRead:
      return s->name == t->name && seal_leq_rec(s->t1, t->t1, tms, tys);
    case TermKind::FieldWrite:
      return s->name == t->name && seal_leq_rec(s->t1, t->t1, tms, tys) &&
             seal_leq_rec(s->t2, t->t2, tms, tys);
    case TermKind::Seal:
      // t is not a Seal here, so s must not be either.
      return false;
  }
  return false;
}

}  // namespace

bool alpha_equal(const TypePtr& a, const TypePtr& b) {
  NamePairs tys;
  return type_alpha_eq(a, b, tys);
}

bool alpha_equal(const TermPtr& a, const TermPtr& b) {
  NamePairs tms, tys;
  return term_alpha_eq(a, b, tms, tys);
}

bool seal_leq(const TermPtr& s, const TermPtr& t) {
  NamePairs tms, tys;
  return seal_leq_rec(s, t, tms, tys);
}

bool store_leq(const Store& s, const Store& t) {
  if (s.entries.size() != t.entries.size()) return false;
  auto it = s.entries.begin();
  auto jt = t.entries.begin();
  for (; it != s.entries.end(); ++it, ++jt) {
    if (it->first != jt->first) return false;
    if (!seal_leq(it->second, jt->second)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Free variables and substitution

std::set<std::string> free_term_vars(const TermPtr& t) {
  std::set<std::string> out;
  switch (t->kind) {
    case TermKind::Var:
      out.insert(t->name);
      break;
    case TermKind::Abs: {
      out = free_term_vars(t->t1);
      out.erase(t->name);
      break;
    }
    default: {
      if (t->t1) {
        auto s = free_term_vars(t->t1);
        out.insert(s.begin(), s.end());
      }
      if (t->t2) {
        auto s = free_term_vars(t->t2);
        out.insert(s.begin(), s.end());
      }
      for (const auto& [label, f] : t->fields) {
        auto s = free_term_vars(f);
        out.insert(s.begin(), s.end());
      }
      break;
    }
  }
  return out;
}

std::set<std::string> free_type_vars(const TypePtr& t) {
  std::set<std::string> out;
  switch (t->kind) {
    case TypeKind::Var:
      out.insert(t->name);
      break;
    case TypeKind::Forall: {
      out = free_type_vars(t->a);
      auto body = free_type_vars(t->b);
      body.erase(t->name);
      out.insert(body.begin(), body.end());
      break;
    }
    default: {
      if (t->a) {
        auto s = free_type_vars(t->a);
        out.insert(s.begin(), s.end());
      }
      if (t->b) {
        auto s = free_type_vars(t->b);
        out.insert(s.begin(), s.end());
      }
      break;
    }
  }
  return out;
}

std::set<std::string> free_type_vars_in_term(const TermPtr& t) {
  std::set<std::string> out;
  if (t->type) {
    auto s = free_type_vars(t->type);
    out.insert(s.begin(), s.end());
  }
  if (t->kind == TermKind::TyAbs) {
    auto body = free_type_vars_in_term(t->t1);
    body.erase(t->name);
    out.insert(body.begin(), body.end());
    return out;
  }
  if (t->t1) {
    auto s = free_type_vars_in_term(t->t1);
    out.insert(s.begin(), s.end());
  }
  if (t->t2) {
    auto s = free_type_vars_in_term(t->t2);
    out.insert(s.begin(), s.end());
  }
  for (const auto& [label, f] : t->fields) {
    auto s = free_type_vars_in_term(f);
    out.insert(s.begin(), s.end());
  }
  return out;
}

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  std::string n = base;
  while (avoid.count(n)) n += '\'';
  return n;
}

TypePtr substitute_type(const TypePtr& body, const std::string& tyvar, const TypePtr& ty) {
  switch (body->kind) {
    case TypeKind::Top:
    case TypeKind::Nat:
      return body;
    case TypeKind::Var:
      return body->name == tyvar ? ty : body;
    case TypeKind::Arrow:
      return ty::arrow(substitute_type(body->a, tyvar, ty), substitute_type(body->b, tyvar, ty));
    case TypeKind::Intersect:
      return ty::inter(substitute_type(body->a, tyvar, ty), substitute_type(body->b, tyvar, ty));
    case TypeKind::Record:
      return ty::record(body->name, substitute_type(body->a, tyvar, ty));
    case TypeKind::Readonly:
      return ty::readonly(substitute_type(body->a, tyvar, ty));
    case TypeKind::Forall: {
      TypePtr bound = substitute_type(body->a, tyvar, ty);
      if (body->name == tyvar) return ty::forall(body->name, bound, body->b);
      auto fv = free_type_vars(ty);
      if (fv.count(body->name)) {
        auto avoid = fv;
        auto bodyfv = free_type_vars(body->b);
        avoid.insert(bodyfv.begin(), bodyfv.end());
        avoid.insert(tyvar);
        std::string renamed = fresh_name(body->name, avoid);
        TypePtr inner = substitute_type(body->b, body->name, ty::var(renamed));
        return ty::forall(renamed, bound, substitute_type(inner, tyvar, ty));
      }
      return ty::forall(body->name, bound, substitute_type(body->b, tyvar, ty));
    }
  }
  return body;
}

TermPtr substitute_term(const TermPtr& body, const std::string& var, const TermPtr& value) {
  switch (body->kind) {
    case TermKind::Var:
      return body->name == var ? value : body;
    case TermKind::NatLit:
    case TermKind::RecordVal:
      return body;
    case TermKind::Abs: {
      if (body->name == var) return body;
      auto fv = free_term_vars(value);
      if (fv.count(body->name)) {
        auto avoid = fv;
        auto bodyfv = free_term_vars(body->t1);
        avoid.insert(bodyfv.begin(), bodyfv.end());
        avoid.insert(var);
        std::string renamed = fresh_name(body->name, avoid);
        TermPtr inner = substitute_term(body->t1, body->name, tm::var(renamed));
        return tm::abs(renamed, body->type, substitute_term(inner, var, value), body->span);
      }
      return tm::abs(body->name, body->type, substitute_term(body->t1, var, value), body->span);
    }
    case TermKind::TyAbs:
      return tm::tyabs(body->name, body->type, substitute_term(body->t1, var, value), body->span);
    case TermKind::App:
      return tm::app(substitute_term(body->t1, var, value), substitute_term(body->t2, var, value),
                     body->span);
    case TermKind::TyApp:
      return tm::tyapp(substitute_term(body->t1, var, value), body->type, body->span);
    case TermKind::RecordLit: {
      std::vector<std::pair<std::string, TermPtr>> fields;
      fields.reserve(body->fields.size());
      for (const auto& [label, f] : body->fields)
        fields.emplace_back(label, substitute_term(f, var, value));
      return tm::record_lit(std::move(fields), body->span);
    }
    case TermKind::FieldRead:
      return tm::field_read(substitute_term(body->t1, var, value), body->name, body->span);
    case TermKind::FieldWrite:
      return tm::field_write(substitute_term(body->t1, var, value), body->name,
                             substitute_term(body->t2, var, value), body->span);
    case TermKind::Seal:
      return tm::seal(substitute_term(body->t1, var, value), body->span);
  }
  return body;
}

TermPtr substitute_type_in_term(const TermPtr& body, const std::string& tyvar, const TypePtr& ty) {
  switch (body->kind) {
    case TermKind::Var:
    case TermKind::NatLit:
    case TermKind::RecordVal:
      return body;
    case TermKind::Abs:
      return tm::abs(body->name, substitute_type(body->type, tyvar, ty),
                     substitute_type_in_term(body->t1, tyvar, ty), body->span);
    case TermKind::TyAbs: {
      TypePtr bound = substitute_type(body->type, tyvar, ty);
      if (body->name == tyvar) return tm::tyabs(body->name, bound, body->t1, body->span);
      auto fv = free_type_vars(ty);
      if (fv.count(body->name)) {
        auto avoid = fv;
        auto bodyfv = free_type_vars_in_term(body->t1);
        avoid.insert(bodyfv.begin(), bodyfv.end());
        avoid.insert(tyvar);
        std::string renamed = fresh_name(body->name, avoid);
        TermPtr inner = substitute_type_in_term(body->t1, body->name, ty::var(renamed));
        return tm::tyabs(renamed, bound, substitute_type_in_term(inner, tyvar, ty), body->span);
      }
      return tm::tyabs(body->name, bound, substitute_type_in_term(body->t1, tyvar, ty), body->span);
    }
    case TermKind::App:
      return tm::app(substitute_type_in_term(body->t1, tyvar, ty),
                     substitute_type_in_term(body->t2, tyvar, ty), body->span);
    case TermKind::TyApp:
      return tm::tyapp(substitute_type_in_term(body->t1, tyvar, ty),
                       substitute_type(body->type, tyvar, ty), body->span);
    case TermKind::RecordLit: {
      std::vector<std::pair<std::string, TermPtr>> fields;
      fields.reserve(body->fields.size());
      for (const auto& [label, f] : body->fields)
        fields.emplace_back(label, substitute_type_in_term(f, tyvar, ty));
      return tm::record_lit(std::move(fields), body->span);
    }
    case TermKind::FieldRead:
      return tm::field_read(substitute_type_in_term(body->t1, tyvar, ty), body->name, body->span);
    case TermKind::FieldWrite:
      return tm::field_write(substitute_type_in_term(body->t1, tyvar, ty), body->name,
                             substitute_type_in_term(body->t2, tyvar, ty), body->span);
    case TermKind::Seal:
      return tm::seal(substitute_type_in_term(body->t1, tyvar, ty), body->span);
  }
  return body;
}

}  // namespace fm
