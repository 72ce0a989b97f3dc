#include "fm/parser.hpp"

#include <cctype>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace fm {

std::string Diagnostic::to_text() const {
  std::ostringstream out;
  out << span.line << ":" << span.column << ": "
      << (severity == Severity::Error ? "error" : "warning") << ": " << message;
  if (!rule.empty()) out << " [" << rule << "]";
  if (!expected_type.empty()) out << " (expected " << expected_type;
  if (!actual_type.empty()) out << (expected_type.empty() ? " (actual " : ", actual ") << actual_type;
  if (!expected_type.empty() || !actual_type.empty()) out << ")";
  return out.str();
}

namespace {

enum class Tok {
  Ident,
  Number,
  KwFun,
  KwTfun,
  KwForall,
  KwSeal,
  KwReadonly,
  KwTop,
  KwNat,
  KwDef,
  KwType,
  LParen,
  RParen,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  Dot,
  Comma,
  Equal,
  Colon,
  Assign,    // :=
  Arrow,     // ->
  Amp,       // &
  Subtype,   // <:
  End,
};

struct Token {
  Tok kind;
  std::string text;
  uint64_t number = 0;
  Span span;
};

struct ParseError {
  Diagnostic diag;
};

[[noreturn]] void fail(Span span, std::string message) {
  throw ParseError{Diagnostic{span, Severity::Error, std::move(message), "", "", ""}};
}

const std::map<std::string, Tok, std::less<>> kKeywords = {
    {"fun", Tok::KwFun},         {"tfun", Tok::KwTfun}, {"forall", Tok::KwForall},
    {"seal", Tok::KwSeal},       {"readonly", Tok::KwReadonly},
    {"Top", Tok::KwTop},         {"Nat", Tok::KwNat},   {"def", Tok::KwDef},
    {"type", Tok::KwType},
};

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto span1 = [&](int len) { return Span{line, col, len}; };
  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++col;
      ++i;
      continue;
    }
    if (c == '-' && i + 1 < text.size() && text[i + 1] == '-') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      if (j < text.size() && (text[j] == 'x' || text[j] == 'X') && text[i] == '0' && j == i + 1)
        fail(span1(2), "location literals (0x...) cannot appear in source programs");
      uint64_t value = std::stoull(std::string(text.substr(i, j - i)));
      out.push_back({Tok::Number, std::string(text.substr(i, j - i)), value,
                     span1(static_cast<int>(j - i))});
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_' ||
              text[j] == '\''))
        ++j;
      std::string word(text.substr(i, j - i));
      auto it = kKeywords.find(word);
      Tok kind = it == kKeywords.end() ? Tok::Ident : it->second;
      out.push_back({kind, word, 0, span1(static_cast<int>(j - i))});
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    auto push = [&](Tok kind, int len) {
      out.push_back({kind, std::string(text.substr(i, len)), 0, span1(len)});
      col += len;
      i += len;
    };
    switch (c) {
      case '(': push(Tok::LParen, 1); break;
      case ')': push(Tok::RParen, 1); break;
      case '{': push(Tok::LBrace, 1); break;
      case '}': push(Tok::RBrace, 1); break;
      case '[': push(Tok::LBracket, 1); break;
      case ']': push(Tok::RBracket, 1); break;
      case '.': push(Tok::Dot, 1); break;
      case ',': push(Tok::Comma, 1); break;
      case '&': push(Tok::Amp, 1); break;
      case '=': push(Tok::Equal, 1); break;
      case ':':
        if (i + 1 < text.size() && text[i + 1] == '=')
          push(Tok::Assign, 2);
        else
          push(Tok::Colon, 1);
        break;
      case '-':
        if (i + 1 < text.size() && text[i + 1] == '>')
          push(Tok::Arrow, 2);
        else
          fail(span1(1), "unexpected character '-'");
        break;
      case '<':
        if (i + 1 < text.size() && text[i + 1] == ':')
          push(Tok::Subtype, 2);
        else
          fail(span1(1), "unexpected character '<'");
        break;
      default:
        fail(span1(1), std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Tok::End, "", 0, Span{line, col, 0}});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  TermPtr parse_term_all() {
    TermPtr t = term();
    expect(Tok::End, "expected end of input");
    return t;
  }

  TypePtr parse_type_all() {
    TypePtr t = type();
    expect(Tok::End, "expected end of input");
    return t;
  }

  // Declarations expand by substitution: later bodies and the main term see
  // earlier `def`s as term substitutions and `type`s as type substitutions.
  TermPtr parse_program_all() {
    std::vector<std::pair<std::string, TermPtr>> defs;
    std::vector<std::pair<std::string, TypePtr>> tydefs;
    auto expand_term = [&](TermPtr t) {
      for (const auto& [name, ty] : tydefs) t = substitute_type_in_term(t, name, ty);
      for (const auto& [name, body] : defs) t = substitute_term(t, name, body);
      return t;
    };
    auto expand_type = [&](TypePtr t) {
      for (const auto& [name, ty] : tydefs) t = substitute_type(t, name, ty);
      return t;
    };
    while (peek().kind == Tok::KwDef || peek().kind == Tok::KwType) {
      if (peek().kind == Tok::KwDef) {
        next();
        Token name = expect(Tok::Ident, "expected a name after 'def'");
        expect(Tok::Equal, "expected '=' in definition");
        in_decl_body_ = true;
        TermPtr body = term();
        in_decl_body_ = false;
        defs.emplace_back(name.text, expand_term(std::move(body)));
      } else {
        next();
        Token name = expect(Tok::Ident, "expected a name after 'type'");
        expect(Tok::Equal, "expected '=' in type definition");
        tydefs.emplace_back(name.text, expand_type(type()));
      }
    }
    if (peek().kind == Tok::End) fail(peek().span, "expected a main term");
    TermPtr main = expand_term(term());
    expect(Tok::End, "expected end of input");
    return main;
  }

 private:
  const Token& peek(int ahead = 0) const {
    size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  Token expect(Tok kind, const char* message) {
    if (peek().kind != kind) fail(peek().span, message);
    return next();
  }

  // term := fun(...) term | tfun(...) term | seal term | assign
  TermPtr term() {
    switch (peek().kind) {
      case Tok::KwFun: {
        Token kw = next();
        expect(Tok::LParen, "expected '(' after 'fun'");
        Token param = expect(Tok::Ident, "expected a parameter name");
        expect(Tok::Colon, "expected ':' after parameter name");
        TypePtr pty = type();
        expect(Tok::RParen, "expected ')' after parameter type");
        TermPtr body = term();
        return tm::abs(param.text, pty, body, kw.span);
      }
      case Tok::KwTfun: {
        Token kw = next();
        expect(Tok::LParen, "expected '(' after 'tfun'");
        Token binder = expect(Tok::Ident, "expected a type variable name");
        expect(Tok::Subtype, "expected '<:' after type variable");
        TypePtr bound = type();
        expect(Tok::RParen, "expected ')' after bound");
        TermPtr body = term();
        return tm::tyabs(binder.text, bound, body, kw.span);
      }
      case Tok::KwSeal: {
        Token kw = next();
        return tm::seal(term(), kw.span);
      }
      default:
        return assign();
    }
  }

  // assign := appterm [":=" term], valid only when the left side is a
  // field projection.
  TermPtr assign() {
    TermPtr lhs = appterm();
    if (peek().kind == Tok::Assign) {
      Token op = next();
      if (lhs->kind != TermKind::FieldRead)
        fail(op.span, "left side of ':=' must be a field access");
      TermPtr rhs = term();
      Span sp = lhs->span;
      return tm::field_write(lhs->t1, lhs->name, rhs, sp);
    }
    return lhs;
  }

  bool starts_atom(Tok k) const {
    return k == Tok::Ident || k == Tok::Number || k == Tok::LParen || k == Tok::LBrace;
  }

  // Inside a declaration body, a token at column 1 begins the next top-level
  // item rather than continuing an application, so bodies that end at a line
  // break do not swallow what follows. Continuation lines must be indented.
  bool layout_break() const { return in_decl_body_ && peek().span.column == 1; }

  // appterm := postfix { postfix | "[" type "]" }
  TermPtr appterm() {
    TermPtr t = postfix();
    for (;;) {
      if (peek().kind == Tok::LBracket) {
        Token open = next();
        TypePtr arg = type();
        expect(Tok::RBracket, "expected ']' after type argument");
        t = tm::tyapp(t, arg, open.span);
      } else if (starts_atom(peek().kind) && !layout_break()) {
        TermPtr arg = postfix();
        t = tm::app(t, arg, t->span.valid() ? t->span : arg->span);
      } else {
        break;
      }
    }
    return t;
  }

  // postfix := atom { "." label }
  TermPtr postfix() {
    TermPtr t = atom();
    while (peek().kind == Tok::Dot) {
      next();
      Token label = expect(Tok::Ident, "expected a field name after '.'");
      Span sp = t->span.valid() ? t->span : label.span;
      sp.length = label.span.column + label.span.length - sp.column;
      t = tm::field_read(t, label.text, sp);
    }
    return t;
  }

  TermPtr atom() {
    const Token& tok = peek();
    switch (tok.kind) {
      case Tok::Ident: {
        Token name = next();
        return tm::var(name.text, name.span);
      }
      case Tok::Number: {
        Token num = next();
        return tm::nat_lit(num.number, num.span);
      }
      case Tok::LParen: {
        next();
        TermPtr t = term();
        expect(Tok::RParen, "expected ')'");
        return t;
      }
      case Tok::LBrace: {
        Token open = next();
        std::vector<std::pair<std::string, TermPtr>> fields;
        if (peek().kind == Tok::RBrace)
          fail(open.span, "record literal needs at least one field");
        for (;;) {
          Token label = expect(Tok::Ident, "expected a field name");
          for (const auto& [seen, ignored] : fields)
            if (seen == label.text)
              fail(label.span, "duplicate record label '" + label.text + "'");
          expect(Tok::Equal, "expected '=' after field name (record types use ':')");
          fields.emplace_back(label.text, term());
          if (peek().kind == Tok::Comma) {
            next();
            continue;
          }
          break;
        }
        expect(Tok::RBrace, "expected '}' after record fields");
        return tm::record_lit(std::move(fields), open.span);
      }
      default:
        fail(tok.span, "expected a term");
    }
  }

  // type := forall(...) type | arrowtype
  TypePtr type() {
    if (peek().kind == Tok::KwForall) {
      next();
      expect(Tok::LParen, "expected '(' after 'forall'");
      Token binder = expect(Tok::Ident, "expected a type variable name");
      expect(Tok::Subtype, "expected '<:' after type variable");
      TypePtr bound = type();
      expect(Tok::RParen, "expected ')' after bound");
      return ty::forall(binder.text, bound, type());
    }
    return arrowtype();
  }

  // arrowtype := intertype ["->" type]
  TypePtr arrowtype() {
    TypePtr lhs = intertype();
    if (peek().kind == Tok::Arrow) {
      next();
      return ty::arrow(lhs, type());
    }
    return lhs;
  }

  // intertype := rotype { "&" rotype }
  TypePtr intertype() {
    TypePtr t = rotype();
    while (peek().kind == Tok::Amp) {
      next();
      t = ty::inter(t, rotype());
    }
    return t;
  }

  // rotype := "readonly" rotype | atomtype
  TypePtr rotype() {
    if (peek().kind == Tok::KwReadonly) {
      next();
      return ty::readonly(rotype());
    }
    return atomtype();
  }

  TypePtr atomtype() {
    const Token& tok = peek();
    switch (tok.kind) {
      case Tok::KwTop:
        next();
        return ty::top();
      case Tok::KwNat:
        next();
        return ty::nat();
      case Tok::Ident: {
        Token name = next();
        return ty::var(name.text);
      }
      case Tok::LParen: {
        next();
        TypePtr t = type();
        expect(Tok::RParen, "expected ')'");
        return t;
      }
      case Tok::LBrace: {
        next();
        Token label = expect(Tok::Ident, "expected a field name");
        expect(Tok::Colon, "expected ':' after field name (record terms use '=')");
        TypePtr field = type();
        if (peek().kind == Tok::Comma)
          fail(peek().span, "record types have one field; combine them with '&'");
        expect(Tok::RBrace, "expected '}' after field type");
        return ty::record(label.text, field);
      }
      default:
        fail(tok.span, "expected a type");
    }
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
  bool in_decl_body_ = false;
};

template <typename Fn>
auto run_parser(std::string_view text, Fn&& fn) {
  using Result = decltype(fn(std::declval<Parser&>()));
  try {
    Parser p(lex(text));
    return std::pair<Result, std::vector<Diagnostic>>(fn(p), {});
  } catch (const ParseError& e) {
    return std::pair<Result, std::vector<Diagnostic>>(nullptr, {e.diag});
  }
}

}  // namespace

ParseResult parse_term(std::string_view text) {
  auto [term, diags] = run_parser(text, [](Parser& p) { return p.parse_term_all(); });
  return ParseResult{term, std::move(diags)};
}

TypeParseResult parse_type(std::string_view text) {
  auto [type, diags] = run_parser(text, [](Parser& p) { return p.parse_type_all(); });
  return TypeParseResult{type, std::move(diags)};
}

ParseResult parse_program(std::string_view text) {
  auto [term, diags] = run_parser(text, [](Parser& p) { return p.parse_program_all(); });
  return ParseResult{term, std::move(diags)};
}

// ---------------------------------------------------------------------------
// Pretty-printing
//
// Levels: 0 term, 1 assign, 2 application, 3 postfix/atom. A node prints
// parenthesized when its own level is below the context's.

namespace {

void print_type(std::ostream& out, const TypePtr& t, int ctx) {
  auto paren = [&](int level, auto&& body) {
    if (level < ctx) {
      out << "(";
      body();
      out << ")";
    } else {
      body();
    }
  };
  switch (t->kind) {
    case TypeKind::Top:
      out << "Top";
      break;
    case TypeKind::Nat:
      out << "Nat";
      break;
    case TypeKind::Var:
      out << t->name;
      break;
    case TypeKind::Record:
      out << "{" << t->name << ": ";
      print_type(out, t->a, 0);
      out << "}";
      break;
    case TypeKind::Arrow:
      paren(1, [&] {
        print_type(out, t->a, 2);
        out << " -> ";
        print_type(out, t->b, 1);
      });
      break;
    case TypeKind::Intersect:
      paren(2, [&] {
        print_type(out, t->a, 2);
        out << " & ";
        print_type(out, t->b, 3);
      });
      break;
    case TypeKind::Readonly:
      paren(3, [&] {
        out << "readonly ";
        print_type(out, t->a, 3);
      });
      break;
    case TypeKind::Forall:
      paren(1, [&] {
        out << "forall(" << t->name << " <: ";
        print_type(out, t->a, 0);
        out << ") ";
        print_type(out, t->b, 1);
      });
      break;
  }
}

void print_term(std::ostream& out, const TermPtr& t, int ctx) {
  auto paren = [&](int level, auto&& body) {
    if (level < ctx) {
      out << "(";
      body();
      out << ")";
    } else {
      body();
    }
  };
  switch (t->kind) {
    case TermKind::Var:
      out << t->name;
      break;
    case TermKind::NatLit:
      out << t->nat;
      break;
    case TermKind::Abs:
      paren(0, [&] {
        out << "fun(" << t->name << ": ";
        print_type(out, t->type, 0);
        out << ") ";
        print_term(out, t->t1, 0);
      });
      break;
    case TermKind::TyAbs:
      paren(0, [&] {
        out << "tfun(" << t->name << " <: ";
        print_type(out, t->type, 0);
        out << ") ";
        print_term(out, t->t1, 0);
      });
      break;
    case TermKind::Seal:
      paren(0, [&] {
        out << "seal ";
        print_term(out, t->t1, 0);
      });
      break;
    case TermKind::App:
      paren(2, [&] {
        print_term(out, t->t1, 2);
        out << " ";
        print_term(out, t->t2, 3);
      });
      break;
    case TermKind::TyApp:
      paren(2, [&] {
        print_term(out, t->t1, 2);
        out << "[";
        print_type(out, t->type, 0);
        out << "]";
      });
      break;
    case TermKind::FieldRead:
      paren(3, [&] {
        print_term(out, t->t1, 3);
        out << "." << t->name;
      });
      break;
    case TermKind::FieldWrite:
      paren(1, [&] {
        print_term(out, t->t1, 3);
        out << "." << t->name << " := ";
        print_term(out, t->t2, 1);
      });
      break;
    case TermKind::RecordLit: {
      out << "{";
      bool first = true;
      for (const auto& [label, field] : t->fields) {
        if (!first) out << ", ";
        first = false;
        out << label << " = ";
        print_term(out, field, 0);
      }
      out << "}";
      break;
    }
    case TermKind::RecordVal: {
      out << "{";
      bool first = true;
      for (const auto& [label, loc] : t->locs) {
        if (!first) out << ", ";
        first = false;
        out << label << " : " << show_location(loc);
      }
      out << "}";
      break;
    }
  }
}

}  // namespace

std::string pretty_type(const TypePtr& t) {
  std::ostringstream out;
  print_type(out, t, 0);
  return out.str();
}

std::string pretty_term(const TermPtr& t) {
  std::ostringstream out;
  print_term(out, t, 0);
  return out.str();
}

std::string show_store(const Store& store) {
  std::ostringstream out;
  out << "[";
  bool first = true;
  for (const auto& [index, value] : store.entries) {
    if (!first) out << ", ";
    first = false;
    out << show_location(Location{index}) << ": " << pretty_term(value);
  }
  out << "]";
  return out.str();
}

}  // namespace fm
