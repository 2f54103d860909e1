#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "kgstroll/term.hpp"

namespace kgstroll::ntriples {

struct ParseOptions {
    // Lenient mode skips malformed statement lines instead of aborting.
    bool lenient = false;
};

struct ParseResult {
    std::vector<Triple> triples;
    size_t skipped = 0;  // malformed lines skipped (lenient mode only)
};

// Parses a whole N-Triples document. Statements are yielded in file order;
// blank lines and comment lines ('#' as first non-blank character) are
// skipped. In strict mode the first malformed line throws ParseError with
// its 1-based line and column.
ParseResult parse(std::istream& in, const ParseOptions& opts = {});
ParseResult parse_string(std::string_view text, const ParseOptions& opts = {});

// Parses one statement line (no trailing newline). Returns false for blank
// and comment lines, true when *out was filled. Malformed input throws
// ParseError carrying `line_no` and the offending column.
bool parse_line(std::string_view line, size_t line_no, Triple* out);

// Canonical N-Triples serialization of one statement, without the newline.
std::string to_line(const Triple& t);
std::string to_string(const Term& t);

}  // namespace kgstroll::ntriples
