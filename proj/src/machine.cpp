#include "fm/machine.hpp"

#include "fm/parser.hpp"

namespace fm {

std::string show_stuck_cause(StuckCause c) {
  switch (c) {
    case StuckCause::WriteThroughSeal: return "write-through-seal";
    case StuckCause::FieldMissing: return "field-missing";
    case StuckCause::NotARecord: return "not-a-record";
    case StuckCause::NotAFunction: return "not-a-function";
    case StuckCause::FreeVariable: return "free-variable";
    case StuckCause::Other: return "other";
  }
  return "other";
}

namespace {

// One congruence-threading pass: find the leftmost-innermost redex, fire it,
// and rebuild the surrounding term. go() returns the rewritten term, or null
// when the input is a value (no cause) or stuck (cause set).
class Stepper {
 public:
  Stepper(const MachineConfig& c, const MachineOptions& opts)
      : opts_(opts), store_(c.store), next_(c.next_location) {}

  TermPtr go(const TermPtr& t) {
    switch (t->kind) {
      case TermKind::Var:
        cause_ = StuckCause::FreeVariable;
        return nullptr;
      case TermKind::Abs:
      case TermKind::TyAbs:
      case TermKind::NatLit:
      case TermKind::RecordVal:
        return nullptr;  // values
      case TermKind::App: {
        if (TermPtr s = go(t->t1)) return tm::app(s, t->t2, t->span);
        if (cause_) return nullptr;
        if (TermPtr s = go(t->t2)) return tm::app(t->t1, s, t->span);
        if (cause_) return nullptr;
        if (t->t1->kind == TermKind::Abs) {
          rule_ = "beta";
          return substitute_term(t->t1->t1, t->t1->name, t->t2);
        }
        cause_ = StuckCause::NotAFunction;
        return nullptr;
      }
      case TermKind::TyApp: {
        if (TermPtr s = go(t->t1)) return tm::tyapp(s, t->type, t->span);
        if (cause_) return nullptr;
        if (t->t1->kind == TermKind::TyAbs) {
          rule_ = "type-beta";
          return substitute_type_in_term(t->t1->t1, t->t1->name, t->type);
        }
        cause_ = StuckCause::NotAFunction;
        return nullptr;
      }
      case TermKind::RecordLit: {
        for (size_t i = 0; i < t->fields.size(); ++i) {
          const TermPtr& f = t->fields[i].second;
          if (is_value(f)) continue;
          if (TermPtr s = go(f)) {
            auto fields = t->fields;
            fields[i].second = s;
            return tm::record_lit(std::move(fields), t->span);
          }
          return nullptr;  // stuck inside a field
        }
        // every field is a value: move them into fresh store locations
        rule_ = "alloc";
        std::vector<std::pair<std::string, Location>> locs;
        locs.reserve(t->fields.size());
        for (const auto& [label, value] : t->fields) {
          Location l{next_++};
          store_.entries[l.index] = value;
          locs.emplace_back(label, l);
        }
        return tm::record_val(std::move(locs));
      }
      case TermKind::FieldRead: {
        if (TermPtr s = go(t->t1)) return tm::field_read(s, t->name, t->span);
        if (cause_) return nullptr;
        const TermPtr& v = t->t1;
        if (v->kind == TermKind::RecordVal) {
          rule_ = "field";
          return read_field(v, t->name);
        }
        if (v->kind == TermKind::Seal) {  // a value, hence seal of a record value
          rule_ = "sealed-field";
          TermPtr inner = read_field(v->t1, t->name);
          if (!inner) return nullptr;
          return opts_.sealed_read_adapts ? tm::seal(inner, t->span) : inner;
        }
        cause_ = StuckCause::NotARecord;
        return nullptr;
      }
      case TermKind::FieldWrite: {
        if (TermPtr s = go(t->t1)) return tm::field_write(s, t->name, t->t2, t->span);
        if (cause_) return nullptr;
        if (TermPtr s = go(t->t2)) return tm::field_write(t->t1, t->name, s, t->span);
        if (cause_) return nullptr;
        TermPtr target = t->t1;
        if (target->kind == TermKind::Seal) {
          if (opts_.write_requires_unsealed) {
            cause_ = StuckCause::WriteThroughSeal;
            return nullptr;
          }
          target = target->t1;
        }
        if (target->kind != TermKind::RecordVal) {
          cause_ = StuckCause::NotARecord;
          return nullptr;
        }
        for (const auto& [label, l] : target->locs) {
          if (label != t->name) continue;
          if (!store_.contains(l)) {
            cause_ = StuckCause::Other;
            return nullptr;
          }
          rule_ = "write-field";
          TermPtr old = store_.get(l);
          if (opts_.write_updates_store) store_.entries[l.index] = t->t2;
          write_effect_ = {l, t->t2};
          return old;  // a write evaluates to the value it replaced
        }
        cause_ = StuckCause::FieldMissing;
        return nullptr;
      }
      case TermKind::Seal: {
        if (is_value(t)) return nullptr;  // seal of a record value
        if (TermPtr s = go(t->t1)) return tm::seal(s, t->span);
        if (cause_) return nullptr;
        const TermPtr& v = t->t1;
        if (v->kind == TermKind::Seal) {
          rule_ = "seal-collapse";
          return v;
        }
        // remaining values the seal has no effect on: functions and numbers
        rule_ = "seal-pass";
        return v;
      }
    }
    cause_ = StuckCause::Other;
    return nullptr;
  }

  const MachineOptions& opts_;
  Store store_;
  uint64_t next_;
  std::string rule_;
  std::optional<StuckCause> cause_;
  std::optional<std::pair<Location, TermPtr>> write_effect_;

 private:
  TermPtr read_field(const TermPtr& rec, const std::string& label) {
    for (const auto& [l, loc] : rec->locs) {
      if (l != label) continue;
      if (!store_.contains(loc)) {
        cause_ = StuckCause::Other;
        return nullptr;
      }
      return store_.get(loc);
    }
    cause_ = StuckCause::FieldMissing;
    return nullptr;
  }
};

}  // namespace

StepResult step(const MachineConfig& c, const MachineOptions& opts) {
  StepResult out;
  if (is_value(c.term)) {
    out.status = StepStatus::Value;
    out.config = c;
    return out;
  }
  Stepper st(c, opts);
  TermPtr next = st.go(c.term);
  if (!next) {
    out.status = StepStatus::Stuck;
    out.config = c;
    out.cause = st.cause_ ? st.cause_ : std::optional<StuckCause>(StuckCause::Other);
    return out;
  }
  out.status = StepStatus::Stepped;
  out.config = MachineConfig{next, std::move(st.store_), st.next_};
  out.rule = st.rule_;
  out.write_effect = std::move(st.write_effect_);
  return out;
}

EvalResult eval(MachineConfig c, uint64_t fuel, const MachineOptions& opts, bool keep_trace) {
  EvalResult out;
  if (keep_trace) out.trace.push_back({c, ""});
  for (;;) {
    StepResult r = step(c, opts);
    if (r.status == StepStatus::Value) {
      out.status = EvalStatus::Value;
      out.final_config = std::move(r.config);
      return out;
    }
    if (r.status == StepStatus::Stuck) {
      out.status = EvalStatus::Stuck;
      out.cause = r.cause;
      out.final_config = std::move(r.config);
      return out;
    }
    if (out.steps >= fuel) {  // a value needs no fuel, so check after stepping
      out.status = EvalStatus::OutOfFuel;
      out.final_config = std::move(c);
      return out;
    }
    c = std::move(r.config);
    ++out.steps;
    if (keep_trace) out.trace.push_back({c, r.rule});
  }
}

std::string show_config(const MachineConfig& c) {
  return "⟨" + pretty_term(c.term) + ", " + show_store(c.store) + "⟩";
}

std::string render_trace(const EvalResult& r) {
  std::string out;
  for (const TraceEntry& e : r.trace) {
    out += show_config(e.config);
    if (!e.rule.empty()) {
      out += "  (";
      out += e.rule;
      out += ")";
    }
    out += "\n";
  }
  if (r.status == EvalStatus::Stuck && r.cause)
    out += "stuck: " + show_stuck_cause(*r.cause) + "\n";
  else if (r.status == EvalStatus::OutOfFuel)
    out += "out of fuel after " + std::to_string(r.steps) + " steps\n";
  return out;
}

}  // namespace fm
