#include "fm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "json.hpp"

namespace fm {

// ---------------------------------------------------------------------------
// crest and erasure

namespace {

TermPtr crest_node(const TypedPtr& n);

TermPtr crest_rebuild(const TypedPtr& n) {
  const TermPtr& t = n->term;
  switch (t->kind) {
    case TermKind::Var:
    case TermKind::NatLit:
    case TermKind::RecordVal:
      return t;
    case TermKind::Abs:
      return tm::abs(t->name, t->type, crest_node(n->children[0]), t->span);
    case TermKind::TyAbs:
      return tm::tyabs(t->name, t->type, crest_node(n->children[0]), t->span);
    case TermKind::App:
      return tm::app(crest_node(n->children[0]), crest_node(n->children[1]), t->span);
    case TermKind::TyApp:
      return tm::tyapp(crest_node(n->children[0]), t->type, t->span);
    case TermKind::RecordLit: {
      std::vector<std::pair<std::string, TermPtr>> fields;
      fields.reserve(t->fields.size());
      for (size_t i = 0; i < t->fields.size(); ++i)
        fields.emplace_back(t->fields[i].first, crest_node(n->children[i]));
      return tm::record_lit(std::move(fields), t->span);
    }
    case TermKind::FieldRead:
      return tm::field_read(crest_node(n->children[0]), t->name, t->span);
    case TermKind::FieldWrite:
      return tm::field_write(crest_node(n->children[0]), t->name, crest_node(n->children[1]),
                             t->span);
    case TermKind::Seal:
      return tm::seal(crest_node(n->children[0]), t->span);
  }
  return t;
}

TermPtr crest_node(const TypedPtr& n) {
  TermPtr rebuilt = crest_rebuild(n);
  if (n->term->kind == TermKind::Seal) return rebuilt;  // never double-wrap
  TypePtr norm = nf(n->type);
  if (norm->kind == TypeKind::Nat) return rebuilt;  // sealing scalars is inert noise
  if (is_readonly_type(n->type)) return tm::seal(rebuilt, n->term->span);
  return rebuilt;
}

}  // namespace

TermPtr crest(const TypedTerm& tt) { return crest_node(tt.root); }

TermPtr erase_seals(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Var:
    case TermKind::NatLit:
    case TermKind::RecordVal:
      return t;
    case TermKind::Abs:
      return tm::abs(t->name, t->type, erase_seals(t->t1), t->span);
    case TermKind::TyAbs:
      return tm::tyabs(t->name, t->type, erase_seals(t->t1), t->span);
    case TermKind::App:
      return tm::app(erase_seals(t->t1), erase_seals(t->t2), t->span);
    case TermKind::TyApp:
      return tm::tyapp(erase_seals(t->t1), t->type, t->span);
    case TermKind::RecordLit: {
      std::vector<std::pair<std::string, TermPtr>> fields;
      fields.reserve(t->fields.size());
      for (const auto& [label, sub] : t->fields) fields.emplace_back(label, erase_seals(sub));
      return tm::record_lit(std::move(fields), t->span);
    }
    case TermKind::FieldRead:
      return tm::field_read(erase_seals(t->t1), t->name, t->span);
    case TermKind::FieldWrite:
      return tm::field_write(erase_seals(t->t1), t->name, erase_seals(t->t2), t->span);
    case TermKind::Seal:
      return erase_seals(t->t1);
  }
  return t;
}

// ---------------------------------------------------------------------------
// Checking-mode typing
//
// Synthesis alone cannot re-type intermediate configurations: record fields
// are invariant, so a field typed at Top whose occupant reduced to a literal
// no longer *synthesizes* the original record type, even though a derivation
// with subsumption at the field premise still exists. This walker distributes
// the expected type through introduction forms (and through argument/target
// positions of eliminations) and falls back to a synthesize-and-subtype pass
// whose own argument and source premises run in checking mode, so subsumed
// subterms deep inside function positions keep their original types too.

namespace {

void components_of(const TypePtr& t, std::vector<TypePtr>& out) {
  if (t->kind == TypeKind::Intersect) {
    components_of(t->a, out);
    components_of(t->b, out);
  } else {
    out.push_back(t);
  }
}

// Records the field types demanded of one specific record literal (the one
// about to allocate) by the checking derivation; used to extend the store
// typing the way the preservation argument does.
struct AllocCapture {
  const TermNode* redex = nullptr;
  std::map<std::string, std::vector<TypePtr>> demands;
};

bool term_contains(const TermPtr& t, const TermNode* needle) {
  if (t.get() == needle) return true;
  switch (t->kind) {
    case TermKind::Abs:
    case TermKind::TyAbs:
    case TermKind::TyApp:
    case TermKind::FieldRead:
    case TermKind::Seal:
      return term_contains(t->t1, needle);
    case TermKind::App:
    case TermKind::FieldWrite:
      return term_contains(t->t1, needle) || term_contains(t->t2, needle);
    case TermKind::RecordLit:
      for (const auto& [label, f] : t->fields)
        if (term_contains(f, needle)) return true;
      return false;
    default:
      return false;
  }
}

class BidiChecker {
 public:
  BidiChecker(const StoreTyping& sigma, AllocCapture* capture = nullptr)
      : sigma_(sigma), capture_(capture) {}

  bool check(const TypeContext& ctx, const TermPtr& t, const TypePtr& target,
             bool spine = true) {
    DemandGuard g(capture_);
    std::vector<TypePtr> comps;
    components_of(nf(target), comps);
    for (const TypePtr& c : comps)
      if (!component(ctx, t, c, spine)) return false;
    g.commit();
    return true;
  }

 private:
  const StoreTyping& sigma_;
  AllocCapture* capture_;

  // Alternatives are tried speculatively, so demands recorded along a branch
  // that ultimately fails must not leak into the store typing: every checking
  // entry point restores the capture on failure.
  class DemandGuard {
   public:
    explicit DemandGuard(AllocCapture* cap) : cap_(cap) {
      if (cap_) saved_ = cap_->demands;
    }
    ~DemandGuard() {
      if (cap_ && !committed_) cap_->demands = std::move(saved_);
    }
    void commit() { committed_ = true; }

   private:
    AllocCapture* cap_;
    std::map<std::string, std::vector<TypePtr>> saved_;
    bool committed_ = false;
  };

  // Synthesis with checking-mode premises: argument, source, and record-field
  // positions that plain synthesis would type minimally are routed through
  // `check`, so a subterm that reduced to something more specific still
  // carries its subsumed type.
  std::optional<TypePtr> synth(const TypeContext& ctx, const TermPtr& t, bool spine) {
    switch (t->kind) {
      case TermKind::Abs: {
        auto body = synth(ctx.with_term(t->name, t->type), t->t1, false);
        if (!body) return std::nullopt;
        return ty::arrow(t->type, *body);
      }
      case TermKind::TyAbs: {
        std::string binder = t->name;
        TermPtr body_term = t->t1;
        if (ctx.lookup_tyvar(binder)) {
          std::set<std::string> avoid = free_type_vars_in_term(t->t1);
          for (const auto& [n, b] : ctx.tyvars) avoid.insert(n);
          binder = fresh_name(binder, avoid);
          body_term = substitute_type_in_term(t->t1, t->name, ty::var(binder));
        }
        auto body = synth(ctx.with_tyvar(binder, t->type), body_term, false);
        if (!body) return std::nullopt;
        return ty::forall(binder, t->type, *body);
      }
      case TermKind::App: {
        auto fn = synth(ctx, t->t1, spine);
        if (!fn) return std::nullopt;
        std::vector<TypePtr> arrows;
        collect_arrows(ctx, nf(*fn), arrows);
        for (const TypePtr& a : arrows) {
          DemandGuard g(capture_);
          if (check(ctx, t->t2, a->a, spine)) {
            g.commit();
            return a->b;
          }
        }
        return std::nullopt;
      }
      case TermKind::TyApp: {
        auto fn = synth(ctx, t->t1, spine);
        if (!fn) return std::nullopt;
        std::vector<TypePtr> foralls;
        collect_foralls(ctx, nf(*fn), foralls);
        for (const TypePtr& f : foralls)
          if (subtype(ctx, t->type, f->a) == SubtypeAnswer::Yes)
            return substitute_type(f->b, f->name, t->type);
        return std::nullopt;
      }
      case TermKind::RecordLit: {
        TypePtr acc;
        for (const auto& [label, value] : t->fields) {
          auto ft = synth(ctx, value, spine);
          if (!ft) return std::nullopt;
          TypePtr one = ty::record(label, *ft);
          acc = acc ? ty::inter(acc, one) : one;
        }
        if (!acc) return std::nullopt;
        return acc;
      }
      case TermKind::FieldRead: {
        auto target = synth(ctx, t->t1, spine);
        if (!target) return std::nullopt;
        auto hit = expose_field(ctx, nf(*target), t->name);
        if (!hit) return std::nullopt;
        return hit->readonly_view ? ty::readonly(hit->type) : hit->type;
      }
      case TermKind::FieldWrite: {
        auto target = synth(ctx, t->t1, spine);
        if (!target) return std::nullopt;
        auto hit = expose_field(ctx, nf(*target), t->name);
        if (!hit || hit->readonly_view) return std::nullopt;
        {
          DemandGuard g(capture_);
          if (check(ctx, t->t2, hit->type, spine)) {
            g.commit();
            return hit->type;
          }
        }
        // The record may have been introduced at a wider field type than its
        // occupant synthesizes (picked so this very write fits); retry with
        // the field at the source's type, then unconstrained.
        if (auto src = synth(ctx, t->t2, spine)) {
          DemandGuard g(capture_);
          if (check(ctx, t->t1, ty::record(t->name, *src), spine)) {
            g.commit();
            return *src;
          }
        }
        {
          DemandGuard g(capture_);
          TypePtr top = ty::top();
          if (check(ctx, t->t1, ty::record(t->name, top), spine) &&
              check(ctx, t->t2, top, spine)) {
            g.commit();
            return top;
          }
        }
        return std::nullopt;
      }
      case TermKind::Seal: {
        auto inner = synth(ctx, t->t1, spine);
        if (!inner) return std::nullopt;
        return ty::readonly(*inner);
      }
      default: {
        TypecheckResult r = typecheck(ctx, sigma_, t);
        if (!r.ok()) return std::nullopt;
        return r.typed->judged;
      }
    }
  }

  bool synth_leq(const TypeContext& ctx, const TermPtr& t, const TypePtr& c, bool spine) {
    DemandGuard g(capture_);
    auto ty = synth(ctx, t, spine);
    if (!ty || subtype(ctx, *ty, c) != SubtypeAnswer::Yes) return false;
    g.commit();
    return true;
  }

  // `spine` marks evaluation positions (where the next redex can sit). The
  // demand capture keys on pointer identity, and substitution shares value
  // subtrees, so a stale copy of the redex can also appear under a binder;
  // only the spine occurrence may record demands.
  bool component(const TypeContext& ctx, const TermPtr& t, const TypePtr& c, bool spine) {
    if (c->kind == TypeKind::Top) {
      // Anything checks at Top, but the derivation below is still free to
      // pick field types; walk on toward a pending allocation so its
      // demands are not lost, then accept regardless.
      if (spine && capture_ && capture_->redex && term_contains(t, capture_->redex)) {
        DemandGuard g(capture_);
        if (structural(ctx, t, c, spine)) g.commit();
      }
      return true;
    }
    {
      DemandGuard g(capture_);
      if (structural(ctx, t, c, spine)) {
        g.commit();
        return true;
      }
    }
    return synth_leq(ctx, t, c, spine);
  }

  bool structural(const TypeContext& ctx, const TermPtr& t, const TypePtr& c, bool spine) {
    switch (t->kind) {
      case TermKind::NatLit:
        return c->kind == TypeKind::Nat;
      case TermKind::Abs:
        return c->kind == TypeKind::Arrow &&
               subtype(ctx, c->a, t->type) == SubtypeAnswer::Yes &&
               check(ctx.with_term(t->name, t->type), t->t1, c->b, false);
      case TermKind::TyAbs: {
        if (c->kind != TypeKind::Forall) return false;
        if (subtype(ctx, c->a, t->type) != SubtypeAnswer::Yes) return false;
        std::set<std::string> avoid = free_type_vars_in_term(t->t1);
        std::set<std::string> more = free_type_vars(c->b);
        avoid.insert(more.begin(), more.end());
        for (const auto& [n, b] : ctx.tyvars) avoid.insert(n);
        std::string x = fresh_name(t->name, avoid);
        return check(ctx.with_tyvar(x, c->a),
                     substitute_type_in_term(t->t1, t->name, ty::var(x)),
                     substitute_type(c->b, c->name, ty::var(x)), false);
      }
      case TermKind::RecordLit: {
        if (c->kind == TypeKind::Top) {
          // unconstrained context: push the walk into non-value fields
          for (const auto& [label, value] : t->fields)
            if (!is_value(value)) (void)component(ctx, value, c, spine);
          return true;
        }
        const TypePtr* rec = nullptr;
        if (c->kind == TypeKind::Record) rec = &c;
        else if (c->kind == TypeKind::Readonly && c->a->kind == TypeKind::Record) rec = &c->a;
        if (!rec) return false;
        for (const auto& [label, value] : t->fields) {
          if (label != (*rec)->name) continue;
          if (spine && capture_ && t.get() == capture_->redex)
            capture_->demands[label].push_back((*rec)->a);
          return check(ctx, value, (*rec)->a);
        }
        return false;  // demanded field absent
      }
      case TermKind::Seal:
        if (c->kind == TypeKind::Top) return component(ctx, t->t1, c, spine);
        if (c->kind != TypeKind::Readonly) return false;
        if (check(ctx, t->t1, c->a, spine)) return true;
        return check(ctx, t->t1, c, spine);  // inner already readonly
      case TermKind::App: {
        if (auto fn = synth(ctx, t->t1, spine)) {
          std::vector<TypePtr> arrows;
          collect_arrows(ctx, nf(*fn), arrows);
          for (const TypePtr& a : arrows) {
            DemandGuard g(capture_);
            if (subtype(ctx, a->b, c) == SubtypeAnswer::Yes && check(ctx, t->t2, a->a, spine)) {
              g.commit();
              return true;
            }
          }
        }
        // The function may only check at the wanted result type (its own
        // synthesis commits to smaller codomains): push the expectation into
        // the function position as an arrow from the argument's type.
        auto at = synth(ctx, t->t2, spine);
        if (at && check(ctx, t->t1, ty::arrow(*at, c), spine)) return true;
        return false;
      }
      case TermKind::TyApp: {
        auto fn = synth(ctx, t->t1, spine);
        if (!fn) return false;
        std::vector<TypePtr> foralls;
        collect_foralls(ctx, nf(*fn), foralls);
        for (const TypePtr& f : foralls)
          if (subtype(ctx, t->type, f->a) == SubtypeAnswer::Yes &&
              subtype(ctx, substitute_type(f->b, f->name, t->type), c) == SubtypeAnswer::Yes)
            return true;
        return false;
      }
      case TermKind::FieldWrite:
        if (c->kind == TypeKind::Top) {
          // Unconstrained result: run the write's own synthesis, whose branch
          // ladder (occupant's type, then source's type, then Top) both
          // validates the write's coherence and captures whichever demand it
          // settles on. A literal Top threaded into field position here would
          // poison the store typing, since invariant fields never trade a
          // precise type for Top.
          if (synth(ctx, t, spine)) return true;
          return component(ctx, t->t1, c, spine) && component(ctx, t->t2, c, spine);
        }
        return check(ctx, t->t1, ty::record(t->name, c)) && check(ctx, t->t2, c);
      case TermKind::FieldRead:
        if (c->kind == TypeKind::Top) {
          // a read constrains nothing but the field's existence; walk on
          return component(ctx, t->t1, c, spine);
        }
        if (check(ctx, t->t1, ty::record(t->name, c))) return true;
        return c->kind == TypeKind::Readonly &&
               check(ctx, t->t1, ty::readonly(ty::record(t->name, c->a)));
      default:
        return false;
    }
  }
};

// The node the machine will rewrite next (mirrors the congruence traversal).
const TermNode* find_redex(const TermPtr& t) {
  if (is_value(t)) return nullptr;
  switch (t->kind) {
    case TermKind::App:
      if (!is_value(t->t1)) return find_redex(t->t1);
      if (!is_value(t->t2)) return find_redex(t->t2);
      return t.get();
    case TermKind::TyApp:
    case TermKind::FieldRead:
    case TermKind::Seal:
      if (!is_value(t->t1)) return find_redex(t->t1);
      return t.get();
    case TermKind::FieldWrite:
      if (!is_value(t->t1)) return find_redex(t->t1);
      if (!is_value(t->t2)) return find_redex(t->t2);
      return t.get();
    case TermKind::RecordLit:
      for (const auto& [label, f] : t->fields)
        if (!is_value(f)) return find_redex(f);
      return t.get();
    default:
      return t.get();
  }
}

std::string fold_detail(const std::string& what, uint64_t step) {
  return what + " at step " + std::to_string(step);
}

}  // namespace

// ---------------------------------------------------------------------------
// Lockstep differential runs

DiffReport pair_run(const MachineConfig& less_sealed, const MachineConfig& more_sealed,
                    uint64_t fuel, const MachineOptions& opts) {
  DiffReport rep;
  rep.retype_ok = true;  // no retype obligation at this level
  MachineConfig cs = less_sealed;
  MachineConfig ct = more_sealed;

  auto fail = [&](std::string detail) -> DiffReport& {
    rep.verdict = DiffVerdict::Violation;
    rep.detail = std::move(detail);
    rep.original_final = cs;
    rep.transformed_final = ct;
    return rep;
  };

  if (!seal_leq(cs.term, ct.term)) return fail("initial terms not related by the seal ordering");
  if (!store_leq(cs.store, ct.store)) return fail("initial stores not related");

  for (uint64_t i = 0;; ++i) {
    if (is_value(cs.term)) {
      rep.original_status = EvalStatus::Value;
      // remaining sealed-side steps may only shed seals (over-sealed descent)
      uint64_t guard = seal_count(ct.term) + 2;
      while (!is_value(ct.term)) {
        if (guard-- == 0) return fail("sealed side failed to discharge down to a value");
        StepResult r = step(ct, opts);
        if (r.status != StepStatus::Stepped) {
          rep.transformed_status = EvalStatus::Stuck;
          rep.transformed_cause = r.cause;
          return fail("sealed side stuck (" +
                      show_stuck_cause(r.cause.value_or(StuckCause::Other)) +
                      ") while the original is a value");
        }
        uint64_t before = seal_count(ct.term);
        ct = std::move(r.config);
        if (seal_count(ct.term) >= before)
          return fail(fold_detail("descent step did not drop the seal count", rep.steps));
        if (!seal_leq(cs.term, ct.term))
          return fail(fold_detail("descent step broke the seal ordering", rep.steps));
        if (!store_leq(cs.store, ct.store))
          return fail(fold_detail("descent step broke the store ordering", rep.steps));
        ++rep.discharge_steps;
      }
      rep.transformed_status = EvalStatus::Value;
      rep.completed = true;
      rep.value_leq = seal_leq(cs.term, ct.term);
      rep.stores_leq = store_leq(cs.store, ct.store);
      rep.original_final = cs;
      rep.transformed_final = ct;
      if (!rep.value_leq) return fail("final values not related by the seal ordering");
      if (!rep.stores_leq) return fail("final stores not related by the store ordering");
      rep.verdict = DiffVerdict::Equivalent;
      return rep;
    }
    if (i >= fuel) {
      rep.original_status = EvalStatus::OutOfFuel;
      rep.transformed_status = EvalStatus::OutOfFuel;
      rep.original_final = cs;
      rep.transformed_final = ct;
      rep.verdict = DiffVerdict::Equivalent;  // the relations are claims about terminating runs
      rep.detail = "out of fuel; termination-conditional relations hold vacuously";
      return rep;
    }
    StepResult rs = step(cs, opts);
    if (rs.status != StepStatus::Stepped) {
      rep.original_status = EvalStatus::Stuck;
      rep.original_cause = rs.cause;
      return fail(fold_detail(
          "original side stuck (" + show_stuck_cause(rs.cause.value_or(StuckCause::Other)) + ")",
          rep.steps));
    }
    MachineConfig prev = cs;
    cs = std::move(rs.config);
    ++rep.steps;
    // the sealed side now either tracks this step or sheds seals first
    uint64_t guard = seal_count(ct.term) + 2;
    for (;;) {
      if (guard-- == 0)
        return fail(fold_detail("sealed side failed to catch up", rep.steps));
      StepResult rt = step(ct, opts);
      if (rt.status != StepStatus::Stepped) {
        rep.transformed_status = EvalStatus::Stuck;
        rep.transformed_cause = rt.cause;
        return fail(fold_detail("sealed side stuck (" +
                                    show_stuck_cause(rt.cause.value_or(StuckCause::Other)) + ")",
                                rep.steps));
      }
      uint64_t before = seal_count(ct.term);
      MachineConfig next = std::move(rt.config);
      if (seal_leq(cs.term, next.term) && store_leq(cs.store, next.store)) {
        ct = std::move(next);
        break;
      }
      if (seal_leq(prev.term, next.term) && store_leq(prev.store, next.store) &&
          seal_count(next.term) < before) {
        ct = std::move(next);
        ++rep.discharge_steps;
        continue;
      }
      ct = std::move(next);
      return fail(fold_detail("sealed-side step neither tracks the original nor sheds a seal",
                              rep.steps));
    }
  }
}

DiffReport diff_run(const TermPtr& program, uint64_t fuel, const MachineOptions& opts) {
  TypecheckResult tc = typecheck({}, {}, program);
  if (!tc.ok()) {
    DiffReport rep;
    rep.detail = "program does not typecheck";
    if (!tc.diagnostics.empty()) rep.detail += ": " + tc.diagnostics.front().to_text();
    return rep;
  }
  TermPtr crested = crest(*tc.typed);
  DiffReport rep = pair_run({program, {}, 1}, {crested, {}, 1}, fuel, opts);
  if (!seal_leq(program, crested)) {
    rep.verdict = DiffVerdict::Violation;
    rep.detail = "crest output is not above the original in the seal ordering";
    return rep;
  }
  TypecheckResult tc2 = typecheck({}, {}, crested);
  rep.retype_ok =
      tc2.ok() && alpha_equal(nf(tc2.typed->judged), nf(tc.typed->judged));
  if (!rep.retype_ok && rep.verdict == DiffVerdict::Equivalent) {
    rep.verdict = DiffVerdict::Violation;
    rep.detail = "crested term does not re-typecheck at the original type";
  }
  return rep;
}

DiffReport erased_run(const TermPtr& program, uint64_t fuel, const MachineOptions& opts) {
  TypecheckResult tc = typecheck({}, {}, program);
  if (!tc.ok()) {
    DiffReport rep;
    rep.detail = "program does not typecheck";
    if (!tc.diagnostics.empty()) rep.detail += ": " + tc.diagnostics.front().to_text();
    return rep;
  }
  const TypePtr& t0 = tc.typed->judged;
  TermPtr erased = erase_seals(program);
  DiffReport rep = pair_run({erased, {}, 1}, {program, {}, 1}, fuel, opts);

  // static half: the seal-free term still checks at the original type
  bool term_ok = BidiChecker({}).check({}, erased, t0);
  // dynamic half: replay the seal-free run, demanding that every configuration
  // (including the final value) keeps checking at the original type under a
  // store typing grown along that run. Erasure does not preserve synthesized
  // types, so the replay is pinned to the original goal type.
  bool value_ok = true;
  if (rep.completed) {
    MonitorReport replay = monitor_run_at(erased, t0, fuel, opts);
    value_ok = replay.ok && replay.status == EvalStatus::Value;
  }
  rep.retype_ok = term_ok && value_ok;
  if (!rep.retype_ok && rep.verdict == DiffVerdict::Equivalent) {
    rep.verdict = DiffVerdict::Violation;
    rep.detail = term_ok ? "erased run does not keep checking at the original type"
                         : "erased term does not re-typecheck at the original type";
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Progress/preservation monitor

MonitorReport monitor_run(const TermPtr& program, uint64_t fuel, const MachineOptions& opts) {
  TypecheckResult tc = typecheck({}, {}, program);
  if (!tc.ok()) {
    MonitorReport rep;
    rep.detail = "program does not typecheck";
    if (!tc.diagnostics.empty()) rep.detail += ": " + tc.diagnostics.front().to_text();
    return rep;
  }
  return monitor_run_at(program, tc.typed->judged, fuel, opts);
}

// Monitored run against an explicit goal type: every configuration of the run
// must keep checking at `t0`. Used directly by the seal-erasure differential,
// where the seal-free term checks at the sealed term's type even when it no
// longer has a synthesizable type of its own.
MonitorReport monitor_run_at(const TermPtr& program, const TypePtr& t0, uint64_t fuel,
                             const MachineOptions& opts) {
  MonitorReport rep;
  StoreTyping sigma;
  MachineConfig c{program, {}, 1};
  rep.ok = true;

  auto violate = [&](std::string what) {
    rep.ok = false;
    rep.detail = fold_detail(std::move(what), rep.steps) + " in " + show_config(c);
    rep.final_typing = sigma;
  };

  for (uint64_t i = 0;; ++i) {
    const TermNode* redex = is_value(c.term) ? nullptr : find_redex(c.term);
    AllocCapture capture;
    capture.redex = (redex && redex->kind == TermKind::RecordLit) ? redex : nullptr;
    BidiChecker bc(sigma, capture.redex ? &capture : nullptr);
    if (!bc.check({}, c.term, t0)) {
      violate("preservation violation: term no longer checks at the original type");
      return rep;
    }
    ++rep.retype_checks;
    for (const auto& [l, v] : c.store.entries) {
      auto it = sigma.entries.find(l);
      if (it == sigma.entries.end() || !bc.check({}, v, it->second)) {
        violate("preservation violation: store entry " + show_location(Location{l}) +
                " no longer checks against its assigned type");
        return rep;
      }
    }
    if (is_value(c.term)) {
      rep.status = EvalStatus::Value;
      rep.final_typing = sigma;
      return rep;
    }
    if (i >= fuel) {
      rep.status = EvalStatus::OutOfFuel;
      rep.final_typing = sigma;
      return rep;
    }
    StepResult r = step(c, opts);
    if (r.status != StepStatus::Stepped) {
      rep.status = EvalStatus::Stuck;
      rep.cause = r.cause;
      violate("progress violation: stuck (" +
              show_stuck_cause(r.cause.value_or(StuckCause::Other)) + ")");
      return rep;
    }
    if (r.rule == "alloc" && capture.redex) {
      // one fresh location per field, in field order
      uint64_t loc = c.next_location;
      for (const auto& [label, value] : capture.redex->fields) {
        TypePtr chosen;
        auto it = capture.demands.find(label);
        if (it != capture.demands.end() && !it->second.empty()) {
          std::vector<TypePtr> kept;
          for (const TypePtr& d : it->second) {
            bool dup = false;
            for (const TypePtr& k : kept) dup = dup || alpha_equal(k, d);
            if (!dup) kept.push_back(d);
          }
          for (const TypePtr& d : kept)
            chosen = chosen ? ty::inter(chosen, d) : d;
        } else {
          TypecheckResult tv = typecheck({}, sigma, value);
          if (!tv.ok()) {
            violate("preservation violation: allocated value does not typecheck");
            return rep;
          }
          chosen = tv.typed->judged;
        }
        sigma.entries[loc++] = chosen;
      }
    }
    if (r.write_effect) {
      // the store must reflect the write, unless old and new coincide
      const auto& [l, v] = *r.write_effect;
      const TermPtr& now = r.config.store.entries.at(l.index);
      if (!alpha_equal(now, v) && !alpha_equal(c.store.entries.at(l.index), v)) {
        c = r.config;
        violate("preservation violation: write did not update the store at " + show_location(l));
        return rep;
      }
    }
    c = std::move(r.config);
    ++rep.steps;
  }
}

// ---------------------------------------------------------------------------
// Report rendering

namespace {

std::string outcome_text(EvalStatus s, const std::optional<StuckCause>& cause) {
  switch (s) {
    case EvalStatus::Value:
      return "value";
    case EvalStatus::Stuck:
      return "stuck(" + show_stuck_cause(cause.value_or(StuckCause::Other)) + ")";
    case EvalStatus::OutOfFuel:
      return "out-of-fuel";
  }
  return "?";
}

const char* ok_text(bool b) { return b ? "ok" : "FAIL"; }

}  // namespace

std::string render(const DiffReport& r) {
  std::string out;
  out += "verdict: ";
  out += r.verdict == DiffVerdict::Equivalent ? "equivalent" : "violation";
  out += "\n";
  if (!r.detail.empty()) out += "detail: " + r.detail + "\n";
  out += "original: " + outcome_text(r.original_status, r.original_cause) + "\n";
  out += "transformed: " + outcome_text(r.transformed_status, r.transformed_cause) + "\n";
  out += "steps: " + std::to_string(r.steps) +
         ", discharge steps: " + std::to_string(r.discharge_steps) + "\n";
  if (r.completed) {
    out += "value ordering: ";
    out += ok_text(r.value_leq);
    out += ", store ordering: ";
    out += ok_text(r.stores_leq);
    out += ", retype: ";
    out += ok_text(r.retype_ok);
    out += "\n";
    out += "original final: " + show_config(r.original_final) + "\n";
    out += "transformed final: " + show_config(r.transformed_final) + "\n";
  }
  return out;
}

std::string render(const MonitorReport& r) {
  std::string out;
  out += r.ok ? "monitor: ok\n" : "monitor: VIOLATION\n";
  if (!r.detail.empty()) out += "detail: " + r.detail + "\n";
  out += "outcome: " + outcome_text(r.status, r.cause) + "\n";
  out += "steps: " + std::to_string(r.steps) +
         ", retype checks: " + std::to_string(r.retype_checks) +
         ", store typing size: " + std::to_string(r.final_typing.size()) + "\n";
  return out;
}

std::string to_json_text(const DiffReport& r) {
  nlohmann::json j;
  j["verdict"] = r.verdict == DiffVerdict::Equivalent ? "equivalent" : "violation";
  j["detail"] = r.detail;
  j["original"] = outcome_text(r.original_status, r.original_cause);
  j["transformed"] = outcome_text(r.transformed_status, r.transformed_cause);
  j["steps"] = r.steps;
  j["discharge_steps"] = r.discharge_steps;
  j["completed"] = r.completed;
  j["value_leq"] = r.value_leq;
  j["stores_leq"] = r.stores_leq;
  j["retype_ok"] = r.retype_ok;
  if (r.completed) {
    j["original_final"] = show_config(r.original_final);
    j["transformed_final"] = show_config(r.transformed_final);
  }
  return j.dump(2);
}

std::string to_json_text(const MonitorReport& r) {
  nlohmann::json j;
  j["ok"] = r.ok;
  j["detail"] = r.detail;
  j["outcome"] = outcome_text(r.status, r.cause);
  j["steps"] = r.steps;
  j["retype_checks"] = r.retype_checks;
  j["store_typing_size"] = r.final_typing.size();
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Generators

namespace {

int roll(std::mt19937_64& rng, int n) {
  return (int)std::uniform_int_distribution<int>(0, n - 1)(rng);
}

const char* kLabels[] = {"x", "y", "z", "a", "b"};
const char* kBinders[] = {"u", "v", "w", "f", "g", "r", "s", "p", "q", "h"};
const char* kTyBinders[] = {"X", "Y", "Z"};

}  // namespace

TypePtr gen_type(std::mt19937_64& rng, int depth, const TypeContext& ctx) {
  if (depth <= 0) {
    int n = ctx.tyvars.empty() ? 3 : 4;
    switch (roll(rng, n)) {
      case 0:
        return ty::top();
      case 1:
      case 2:
        return ty::nat();
      default:
        return ty::var(ctx.tyvars[roll(rng, (int)ctx.tyvars.size())].first);
    }
  }
  int w = roll(rng, 15);
  if (w < 1) return ty::top();
  if (w < 3) return ty::nat();
  if (w < 4 && !ctx.tyvars.empty())
    return ty::var(ctx.tyvars[roll(rng, (int)ctx.tyvars.size())].first);
  if (w < 6) return ty::arrow(gen_type(rng, depth - 1, ctx), gen_type(rng, depth - 1, ctx));
  if (w < 7) {
    std::set<std::string> avoid;
    for (const auto& [n, b] : ctx.tyvars) avoid.insert(n);
    std::string x = fresh_name(kTyBinders[roll(rng, 3)], avoid);
    TypePtr bound = gen_type(rng, depth - 1, ctx);
    TypePtr body = gen_type(rng, depth - 1, ctx.with_tyvar(x, bound));
    return ty::forall(x, bound, body);
  }
  if (w < 10)
    return ty::record(kLabels[roll(rng, 5)], gen_type(rng, depth - 1, ctx));
  if (w < 12)
    return ty::inter(gen_type(rng, depth - 1, ctx), gen_type(rng, depth - 1, ctx));
  return ty::readonly(gen_type(rng, depth - 1, ctx));
}

namespace {

// Type-directed term builder. Every assembled candidate is verified with the
// checker before being returned, so outputs typecheck at (a subtype of) the
// requested type by construction.
class TermGen {
 public:
  TermGen(std::mt19937_64& rng, uint64_t fuel) : rng_(rng), fuel_(fuel) {}

  TermPtr at(const TypeContext& ctx, const TypePtr& target, int size) {
    if (fuel_ == 0) return nullptr;
    --fuel_;
    TypePtr goal = nf(target);
    for (int attempt = 0; attempt < 4; ++attempt) {
      TermPtr cand;
      if (attempt == 0) {
        if (roll(rng_, 3) == 0) cand = from_var(ctx, goal);
      } else if (attempt == 1) {
        if (size > 0 && roll(rng_, 3) == 0) cand = elim(ctx, goal, size);
      } else {
        cand = intro(ctx, goal, size);
      }
      if (!cand) continue;
      TypecheckResult r = typecheck(ctx, {}, cand);
      if (r.ok() && subtype(ctx, r.typed->judged, goal) == SubtypeAnswer::Yes) return cand;
    }
    return nullptr;
  }

  // Like at(), but the result synthesizes the goal exactly (an identity
  // application is inserted when the synthesized type is a strict subtype),
  // which record fields need because field subtyping is invariant.
  TermPtr exact(const TypeContext& ctx, const TypePtr& goal, int size) {
    TermPtr t = at(ctx, goal, size);
    if (!t) return nullptr;
    TypecheckResult r = typecheck(ctx, {}, t);
    if (!r.ok()) return nullptr;
    if (subtype(ctx, goal, r.typed->judged) == SubtypeAnswer::Yes) return t;  // already mutual
    std::set<std::string> avoid;
    for (const auto& [n, ignored] : ctx.terms) avoid.insert(n);
    std::string x = fresh_name("c", avoid);
    return tm::app(tm::abs(x, goal, tm::var(x)), t);
  }

 private:
  std::mt19937_64& rng_;
  uint64_t fuel_;

  TermPtr from_var(const TypeContext& ctx, const TypePtr& goal) {
    std::vector<const std::string*> hits;
    for (const auto& [name, type] : ctx.terms)
      if (subtype(ctx, type, goal) == SubtypeAnswer::Yes) hits.push_back(&name);
    if (hits.empty()) return nullptr;
    return tm::var(*hits[roll(rng_, (int)hits.size())]);
  }

  std::string fresh_binder(const TypeContext& ctx) {
    std::set<std::string> avoid;
    for (const auto& [n, ignored] : ctx.terms) avoid.insert(n);
    return fresh_name(kBinders[roll(rng_, 10)], avoid);
  }

  TermPtr intro(const TypeContext& ctx, const TypePtr& goal, int size) {
    std::vector<TypePtr> comps;
    components_of(goal, comps);
    std::vector<TypePtr> solid;
    for (const TypePtr& c : comps)
      if (c->kind != TypeKind::Top) solid.push_back(c);
    if (solid.empty())  // Top (or an intersection of Tops)
      return roll(rng_, 2) ? tm::nat_lit((uint64_t)roll(rng_, 100))
                           : tm::record_lit({{"x", tm::nat_lit((uint64_t)roll(rng_, 10))}});
    if (solid.size() > 1) {
      // inhabit an intersection only when it is a consistent record bundle
      std::vector<std::pair<std::string, TypePtr>> fields;
      for (const TypePtr& c : solid) {
        const TypePtr* rec = nullptr;
        if (c->kind == TypeKind::Record) rec = &c;
        else if (c->kind == TypeKind::Readonly && c->a->kind == TypeKind::Record) rec = &c->a;
        if (!rec) return nullptr;
        bool dup = false;
        for (const auto& [label, ft] : fields)
          if (label == (*rec)->name) {
            if (!alpha_equal(ft, (*rec)->a)) return nullptr;
            dup = true;
          }
        if (!dup) fields.emplace_back((*rec)->name, (*rec)->a);
      }
      std::vector<std::pair<std::string, TermPtr>> lit;
      for (const auto& [label, ft] : fields) {
        TermPtr v = exact(ctx, ft, size - 1);
        if (!v) return nullptr;
        lit.emplace_back(label, v);
      }
      return tm::record_lit(std::move(lit));
    }
    const TypePtr& c = solid.front();
    switch (c->kind) {
      case TypeKind::Nat:
        return tm::nat_lit((uint64_t)roll(rng_, 100));
      case TypeKind::Arrow: {
        std::string x = fresh_binder(ctx);
        TermPtr body = at(ctx.with_term(x, c->a), c->b, size - 1);
        if (!body) return nullptr;
        return tm::abs(x, c->a, body);
      }
      case TypeKind::Forall: {
        std::set<std::string> avoid;
        for (const auto& [n, b] : ctx.tyvars) avoid.insert(n);
        std::string x = fresh_name(c->name, avoid);
        TypePtr body_ty = x == c->name ? c->b : substitute_type(c->b, c->name, ty::var(x));
        TermPtr body = at(ctx.with_tyvar(x, c->a), body_ty, size - 1);
        if (!body) return nullptr;
        return tm::tyabs(x, c->a, body);
      }
      case TypeKind::Record: {
        TermPtr v = exact(ctx, c->a, size - 1);
        if (!v) return nullptr;
        return tm::record_lit({{c->name, v}});
      }
      case TypeKind::Readonly: {
        if (c->a->kind == TypeKind::Record) {
          TermPtr inner = at(ctx, c->a, size - 1);
          if (!inner) return nullptr;
          // sometimes leave the record mutable: mutable <= readonly
          return roll(rng_, 2) ? tm::seal(inner) : inner;
        }
        TermPtr v = from_var(ctx, c->a);  // readonly variable: seal a witness
        return v ? tm::seal(v) : from_var(ctx, c);
      }
      case TypeKind::Var:
        return from_var(ctx, c);
      default:
        return nullptr;
    }
  }

  TermPtr elim(const TypeContext& ctx, const TypePtr& goal, int size) {
    switch (roll(rng_, 4)) {
      case 0: {  // application
        TypePtr dom = gen_type(rng_, 1, ctx);
        TermPtr f = at(ctx, ty::arrow(dom, goal), size - 1);
        if (!f) return nullptr;
        TermPtr a = at(ctx, dom, size - 1);
        if (!a) return nullptr;
        return tm::app(f, a);
      }
      case 1: {  // field read
        std::string l = kLabels[roll(rng_, 5)];
        TermPtr t = at(ctx, ty::record(l, goal), size - 1);
        if (!t) return nullptr;
        return tm::field_read(t, l);
      }
      case 2: {  // field write (evaluates to the replaced value)
        std::string l = kLabels[roll(rng_, 5)];
        TermPtr t = at(ctx, ty::record(l, goal), size - 1);
        if (!t) return nullptr;
        TermPtr v = exact(ctx, goal, size - 1);
        if (!v) return nullptr;
        return tm::field_write(t, l, v);
      }
      default: {  // read through a seal, when the goal is a readonly type
        if (goal->kind != TypeKind::Readonly) return nullptr;
        std::string l = kLabels[roll(rng_, 5)];
        TermPtr t = at(ctx, ty::readonly(ty::record(l, goal->a)), size - 1);
        if (!t) return nullptr;
        return tm::field_read(t, l);
      }
    }
  }
};

}  // namespace

TermPtr gen_well_typed(std::mt19937_64& rng, const TypeContext& ctx, const TypePtr& target,
                       uint64_t fuel) {
  TermGen gen(rng, fuel);
  return gen.at(ctx, target, 3);
}

TermPtr gen_program(std::mt19937_64& rng, int depth) {
  for (int attempt = 0; attempt < 50; ++attempt) {
    TypePtr target = gen_type(rng, depth, {});
    TermGen gen(rng, 400);
    if (TermPtr t = gen.at({}, target, depth)) return t;
  }
  return tm::nat_lit(0);
}

// ---------------------------------------------------------------------------
// Shrinking

namespace {

TermPtr zero_literals(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::NatLit:
      return t->nat == 0 ? t : tm::nat_lit(0, t->span);
    case TermKind::Var:
    case TermKind::RecordVal:
      return t;
    case TermKind::Abs:
      return tm::abs(t->name, t->type, zero_literals(t->t1), t->span);
    case TermKind::TyAbs:
      return tm::tyabs(t->name, t->type, zero_literals(t->t1), t->span);
    case TermKind::App:
      return tm::app(zero_literals(t->t1), zero_literals(t->t2), t->span);
    case TermKind::TyApp:
      return tm::tyapp(zero_literals(t->t1), t->type, t->span);
    case TermKind::RecordLit: {
      std::vector<std::pair<std::string, TermPtr>> fields;
      for (const auto& [l, v] : t->fields) fields.emplace_back(l, zero_literals(v));
      return tm::record_lit(std::move(fields), t->span);
    }
    case TermKind::FieldRead:
      return tm::field_read(zero_literals(t->t1), t->name, t->span);
    case TermKind::FieldWrite:
      return tm::field_write(zero_literals(t->t1), t->name, zero_literals(t->t2), t->span);
    case TermKind::Seal:
      return tm::seal(zero_literals(t->t1), t->span);
  }
  return t;
}

// All variants of t with exactly one record-literal field removed.
void field_drop_variants(const TermPtr& t, const std::function<TermPtr(TermPtr)>& rebuild,
                         std::vector<TermPtr>& out) {
  auto recurse1 = [&](const TermPtr& sub, auto make) {
    field_drop_variants(sub, [&](TermPtr s) { return rebuild(make(std::move(s))); }, out);
  };
  switch (t->kind) {
    case TermKind::Abs:
      recurse1(t->t1, [&](TermPtr s) { return tm::abs(t->name, t->type, s, t->span); });
      break;
    case TermKind::TyAbs:
      recurse1(t->t1, [&](TermPtr s) { return tm::tyabs(t->name, t->type, s, t->span); });
      break;
    case TermKind::App:
      recurse1(t->t1, [&](TermPtr s) { return tm::app(s, t->t2, t->span); });
      recurse1(t->t2, [&](TermPtr s) { return tm::app(t->t1, s, t->span); });
      break;
    case TermKind::TyApp:
      recurse1(t->t1, [&](TermPtr s) { return tm::tyapp(s, t->type, t->span); });
      break;
    case TermKind::Seal:
      recurse1(t->t1, [&](TermPtr s) { return tm::seal(s, t->span); });
      break;
    case TermKind::FieldRead:
      recurse1(t->t1, [&](TermPtr s) { return tm::field_read(s, t->name, t->span); });
      break;
    case TermKind::FieldWrite:
      recurse1(t->t1, [&](TermPtr s) { return tm::field_write(s, t->name, t->t2, t->span); });
      recurse1(t->t2, [&](TermPtr s) { return tm::field_write(t->t1, t->name, s, t->span); });
      break;
    case TermKind::RecordLit: {
      if (t->fields.size() >= 2)
        for (size_t i = 0; i < t->fields.size(); ++i) {
          auto fields = t->fields;
          fields.erase(fields.begin() + (long)i);
          out.push_back(rebuild(tm::record_lit(std::move(fields), t->span)));
        }
      for (size_t i = 0; i < t->fields.size(); ++i)
        recurse1(t->fields[i].second, [&, i](TermPtr s) {
          auto fields = t->fields;
          fields[i].second = std::move(s);
          return tm::record_lit(std::move(fields), t->span);
        });
      break;
    }
    default:
      break;
  }
}

}  // namespace

TermPtr shrink(const TermPtr& t, const std::function<bool(const TermPtr&)>& still_fails) {
  TermPtr cur = t;
  for (int round = 0; round < 16; ++round) {
    std::vector<TermPtr> cands;
    TermPtr e = erase_seals(cur);
    if (!alpha_equal(e, cur)) cands.push_back(e);
    TermPtr z = zero_literals(cur);
    if (!alpha_equal(z, cur)) cands.push_back(z);
    field_drop_variants(cur, [](TermPtr s) { return s; }, cands);
    bool improved = false;
    for (const TermPtr& c : cands)
      if (still_fails(c)) {
        cur = c;
        improved = true;
        break;
      }
    if (!improved) break;
  }
  return cur;
}

// ---------------------------------------------------------------------------
// Campaigns

std::mt19937_64 rng_for_index(uint64_t seed, uint64_t index) {
  // SplitMix64 finalizer over (seed, index): stable independent streams
  uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  z ^= z >> 31;
  return std::mt19937_64(z);
}

CampaignResult run_campaign(
    const CampaignOptions& opts,
    const std::function<std::optional<std::string>(uint64_t, std::mt19937_64&)>& check) {
  CampaignResult res;
  res.total = opts.count;
  unsigned workers = opts.workers > 0
                         ? (unsigned)opts.workers
                         : std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  std::atomic<uint64_t> next{0};
  std::mutex mu;
  auto body = [&] {
    for (;;) {
      uint64_t i = next.fetch_add(1);
      if (i >= (uint64_t)opts.count) return;
      std::mt19937_64 rng = rng_for_index(opts.seed, i);
      std::optional<std::string> failure;
      try {
        failure = check(i, rng);
      } catch (const std::exception& e) {
        failure = std::string("unexpected exception: ") + e.what();
      }
      std::lock_guard<std::mutex> lock(mu);
      if (failure)
        res.failures.push_back("index " + std::to_string(i) + ": " + *failure);
      else
        ++res.passed;
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  std::sort(res.failures.begin(), res.failures.end());
  return res;
}

CampaignResult campaign_nf(const CampaignOptions& opts) {
  return run_campaign(opts, [&](uint64_t, std::mt19937_64& rng) -> std::optional<std::string> {
    TypePtr t = gen_type(rng, opts.depth, {});
    TypePtr n = nf(t);
    if (!is_normal(n)) return "nf produced a non-normal type: " + pretty_type(n);
    if (!alpha_equal(nf(n), n)) return "nf not idempotent on " + pretty_type(t);
    if (is_normal(t) && !alpha_equal(n, t))
      return "nf changed an already-normal type " + pretty_type(t);
    if (opts.depth <= 3) {
      // equivalence with the declarative relation, both directions
      if (subtype_oracle({}, t, n, opts.oracle_depth) != OracleAnswer::Proven)
        return "no proof of T <= nf(T) for " + pretty_type(t);
      if (subtype_oracle({}, n, t, opts.oracle_depth) != OracleAnswer::Proven)
        return "no proof of nf(T) <= T for " + pretty_type(t);
    }
    return std::nullopt;
  });
}

CampaignResult campaign_subtype_agreement(const CampaignOptions& opts) {
  return run_campaign(opts, [&](uint64_t i, std::mt19937_64& rng) -> std::optional<std::string> {
    TypePtr s, t;
    // mix in related pairs so positive instances are well represented
    switch (i % 3) {
      case 0:
        s = gen_type(rng, opts.depth, {});
        t = ty::readonly(s);
        break;
      case 1:
        t = gen_type(rng, opts.depth, {});
        s = nf(t);
        break;
      default:
        s = gen_type(rng, opts.depth, {});
        t = gen_type(rng, opts.depth, {});
    }
    SubtypeAnswer engine = subtype({}, s, t);
    if (engine == SubtypeAnswer::Yes && subtype_oracle({}, s, t, 10) != OracleAnswer::Proven)
      return "engine accepts but no declarative proof within depth 10: " + pretty_type(s) +
             " <= " + pretty_type(t);
    if (subtype_oracle({}, s, t, 5) == OracleAnswer::Proven && engine != SubtypeAnswer::Yes)
      return "declarative proof at depth 5 but engine rejects: " + pretty_type(s) +
             " <= " + pretty_type(t);
    return std::nullopt;
  });
}

namespace {

std::string describe_failure(const TermPtr& program, const std::string& what,
                             const std::function<bool(const TermPtr&)>& still_fails) {
  TermPtr small = shrink(program, still_fails);
  return what + "\n  program: " + pretty_term(program) + "\n  shrunk: " + pretty_term(small);
}

}  // namespace

CampaignResult campaign_monitor(const CampaignOptions& opts) {
  return run_campaign(opts, [&](uint64_t, std::mt19937_64& rng) -> std::optional<std::string> {
    TermPtr program = gen_program(rng, opts.depth);
    TypecheckResult tc = typecheck({}, {}, program);
    if (!tc.ok())
      return "generated program does not typecheck: " + pretty_term(program);
    MonitorReport rep = monitor_run(program, opts.fuel);
    if (rep.ok && rep.status != EvalStatus::Stuck) return std::nullopt;
    auto fails = [&](const TermPtr& c) {
      if (!typecheck({}, {}, c).ok()) return false;
      MonitorReport r = monitor_run(c, opts.fuel);
      return !r.ok || r.status == EvalStatus::Stuck;
    };
    return describe_failure(program, rep.detail.empty() ? "stuck outcome" : rep.detail, fails);
  });
}

CampaignResult campaign_diff(const CampaignOptions& opts) {
  return run_campaign(opts, [&](uint64_t, std::mt19937_64& rng) -> std::optional<std::string> {
    TermPtr program = gen_program(rng, opts.depth);
    DiffReport rep = diff_run(program, opts.fuel);
    if (rep.verdict == DiffVerdict::Equivalent) return std::nullopt;
    auto fails = [&](const TermPtr& c) {
      return typecheck({}, {}, c).ok() && diff_run(c, opts.fuel).verdict != DiffVerdict::Equivalent;
    };
    return describe_failure(program, rep.detail, fails);
  });
}

CampaignResult campaign_erased(const CampaignOptions& opts) {
  return run_campaign(opts, [&](uint64_t, std::mt19937_64& rng) -> std::optional<std::string> {
    TermPtr program = gen_program(rng, opts.depth);
    DiffReport rep = erased_run(program, opts.fuel);
    if (rep.verdict == DiffVerdict::Equivalent) return std::nullopt;
    auto fails = [&](const TermPtr& c) {
      return typecheck({}, {}, c).ok() &&
             erased_run(c, opts.fuel).verdict != DiffVerdict::Equivalent;
    };
    return describe_failure(program, rep.detail, fails);
  });
}

}  // namespace fm
