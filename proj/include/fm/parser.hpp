#pragma once

// Surface syntax for F_M programs (.fm files): lexer, recursive-descent
// parser and a pretty-printer whose output re-parses to an alpha-equivalent
// term. The grammar is documented in docs/surface-syntax.md.

#include <string>
#include <string_view>
#include <vector>

#include "fm/syntax.hpp"

namespace fm {

enum class Severity { Error, Warning };

struct Diagnostic {
  Span span;
  Severity severity = Severity::Error;
  std::string message;
  std::string rule;           // typing/subtyping rule implicated, if any
  std::string expected_type;  // pretty-printed, when relevant
  std::string actual_type;

  std::string to_text() const;
};

struct ParseResult {
  TermPtr term;  // null on failure
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return term != nullptr; }
};

struct TypeParseResult {
  TypePtr type;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return type != nullptr; }
};

// A single term, no declarations.
ParseResult parse_term(std::string_view text);
TypeParseResult parse_type(std::string_view text);

// Full program: `def name = term` and `type Name = T` declarations followed
// by one main term. Declarations are expanded by substitution, so the result
// is a single TermNode.
ParseResult parse_program(std::string_view text);

std::string pretty_term(const TermPtr& t);
std::string pretty_type(const TypePtr& t);

// `[0x0001: 5, 0x0002: {x : 0x0001}]`, entries in location order.
std::string show_store(const Store& store);

}  // namespace fm
