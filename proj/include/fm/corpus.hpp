#pragma once

// The bundled example programs and their expected checker verdicts, shared
// by the command-line tool, the test suites, and the acceptance runner.

#include <string>
#include <vector>

#include "fm/syntax.hpp"

namespace fm {

enum class Expectation { Accept, RejectWith };

struct CorpusEntry {
  std::string name;    // file stem, e.g. "good"
  std::string path;    // full path the source was read from
  std::string source;  // raw file contents
  TermPtr term;        // parsed program (declarations expanded)
  Expectation expected = Expectation::Accept;
  std::string cause;   // expected diagnostic rule for RejectWith entries
};

// Reads every bundled program from dir. Throws std::runtime_error when a
// bundled file is missing, unreadable, or fails to parse.
std::vector<CorpusEntry> load_corpus(const std::string& dir);

}  // namespace fm
