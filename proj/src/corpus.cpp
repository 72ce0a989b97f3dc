#include "fm/corpus.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fm/parser.hpp"

namespace fm {

namespace {

struct Listing {
  const char* name;
  Expectation expected;
  const char* cause;
};

constexpr Listing kListing[] = {
    {"good", Expectation::Accept, ""},
    {"bad1", Expectation::RejectWith, "write-through-readonly"},
    {"bad2", Expectation::RejectWith, "write-through-readonly"},
    {"access", Expectation::Accept, ""},
    {"access-poly", Expectation::Accept, ""},
    {"inplace-map", Expectation::Accept, ""},
    {"write", Expectation::Accept, ""},
    {"sealed-read", Expectation::Accept, ""},
    {"sealed-write", Expectation::RejectWith, "write-through-readonly"},
    {"seal-pass", Expectation::Accept, ""},
};

}  // namespace

std::vector<CorpusEntry> load_corpus(const std::string& dir) {
  std::vector<CorpusEntry> out;
  out.reserve(std::size(kListing));
  for (const Listing& l : kListing) {
    CorpusEntry e;
    e.name = l.name;
    e.path = dir + "/" + l.name + ".fm";
    e.expected = l.expected;
    e.cause = l.cause;
    std::ifstream in(e.path, std::ios::binary);
    if (!in) throw std::runtime_error("corpus file missing or unreadable: " + e.path);
    std::ostringstream buf;
    buf << in.rdbuf();
    e.source = buf.str();
    ParseResult p = parse_program(e.source);
    if (!p.ok()) {
      std::string msg = "corpus file does not parse: " + e.path;
      if (!p.diagnostics.empty()) msg += " (" + p.diagnostics.front().to_text() + ")";
      throw std::runtime_error(msg);
    }
    e.term = p.term;
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace fm
