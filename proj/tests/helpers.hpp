#pragma once

// Shared parsing shorthands for the test suites. These REQUIRE success, so a
// surface-syntax typo in a test shows up as a parse failure, not a nullptr.

#include <string>

#include "doctest.h"
#include "fm/parser.hpp"
#include "fm/syntax.hpp"

namespace fmtest {

inline fm::TypePtr T(const std::string& text) {
  fm::TypeParseResult r = fm::parse_type(text);
  REQUIRE_MESSAGE(r.ok(), "type failed to parse: " << text);
  return r.type;
}

inline fm::TermPtr E(const std::string& text) {
  fm::ParseResult r = fm::parse_term(text);
  REQUIRE_MESSAGE(r.ok(), "term failed to parse: " << text);
  return r.term;
}

inline fm::TermPtr P(const std::string& text) {
  fm::ParseResult r = fm::parse_program(text);
  REQUIRE_MESSAGE(r.ok(), "program failed to parse: " << text);
  return r.term;
}

}  // namespace fmtest
