#include "kgstroll/ntriples.hpp"

#include <cctype>
#include <sstream>

#include "kgstroll/errors.hpp"

namespace kgstroll::ntriples {

namespace {

// Cursor over one statement line. Columns are 1-based bytes.
struct LineCursor {
    std::string_view text;
    size_t pos = 0;
    size_t line_no;

    explicit LineCursor(std::string_view t, size_t ln) : text(t), line_no(ln) {}

    bool eof() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }

    [[noreturn]] void fail(const std::string& msg, size_t at) const {
        throw ParseError(msg, line_no, at + 1);
    }
    [[noreturn]] void fail(const std::string& msg) const { fail(msg, pos); }

    void skip_ws() {
        while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos;
    }

    bool require_ws() {
        size_t before = pos;
        skip_ws();
        return pos > before;
    }
};

bool is_hex(char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

uint32_t hex_value(char c) {
    if (c >= '0' && c <= '9') return uint32_t(c - '0');
    if (c >= 'a' && c <= 'f') return uint32_t(c - 'a' + 10);
    return uint32_t(c - 'A' + 10);
}

void append_utf8(std::string& out, uint32_t cp, LineCursor& cur, size_t at) {
    if (cp >= 0xD800 && cp <= 0xDFFF) cur.fail("surrogate code point in \\u escape", at);
    if (cp > 0x10FFFF) cur.fail("code point beyond U+10FFFF", at);
    if (cp < 0x80) {
        out.push_back(char(cp));
    } else if (cp < 0x800) {
        out.push_back(char(0xC0 | (cp >> 6)));
        out.push_back(char(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(char(0xE0 | (cp >> 12)));
        out.push_back(char(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(char(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(char(0xF0 | (cp >> 18)));
        out.push_back(char(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(char(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(char(0x80 | (cp & 0x3F)));
    }
}

// \uXXXX or \UXXXXXXXX; cursor sits on 'u' or 'U'.
void parse_uchar(LineCursor& cur, std::string& out) {
    size_t start = cur.pos - 1;
    size_t digits = cur.peek() == 'u' ? 4 : 8;
    ++cur.pos;
    uint32_t cp = 0;
    for (size_t i = 0; i < digits; ++i) {
        if (cur.eof() || !is_hex(cur.peek()))
            cur.fail("expected " + std::to_string(digits) + " hex digits in escape", start);
        cp = (cp << 4) | hex_value(cur.peek());
        ++cur.pos;
    }
    append_utf8(out, cp, cur, start);
}

Term parse_iri(LineCursor& cur) {
    size_t start = cur.pos;
    ++cur.pos;  // '<'
    std::string lex;
    while (true) {
        if (cur.eof()) cur.fail("unterminated IRI", start);
        char c = cur.peek();
        if (c == '>') {
            ++cur.pos;
            break;
        }
        if (c == '\\') {
            ++cur.pos;
            if (cur.eof() || (cur.peek() != 'u' && cur.peek() != 'U'))
                cur.fail("only \\u / \\U escapes allowed in IRI", cur.pos - 1);
            parse_uchar(cur, lex);
            continue;
        }
        if (static_cast<unsigned char>(c) <= 0x20 || c == '<' || c == '"' || c == '{' ||
            c == '}' || c == '|' || c == '^' || c == '`')
            cur.fail("character not allowed in IRI");
        lex.push_back(c);
        ++cur.pos;
    }
    if (lex.empty()) cur.fail("empty IRI", start);
    return Term::iri(std::move(lex));
}

Term parse_blank(LineCursor& cur) {
    size_t start = cur.pos;
    cur.pos += 2;  // "_:"
    std::string label;
    while (!cur.eof()) {
        char c = cur.peek();
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.') {
            label.push_back(c);
            ++cur.pos;
        } else {
            break;
        }
    }
    // A trailing '.' belongs to the statement terminator, not the label.
    while (!label.empty() && label.back() == '.') {
        label.pop_back();
        --cur.pos;
    }
    if (label.empty()) cur.fail("empty blank node label", start);
    return Term::blank(std::move(label));
}

Term parse_literal(LineCursor& cur) {
    size_t start = cur.pos;
    ++cur.pos;  // '"'
    std::string lex;
    while (true) {
        if (cur.eof()) cur.fail("unterminated string literal", start);
        char c = cur.peek();
        if (c == '"') {
            ++cur.pos;
            break;
        }
        if (c == '\\') {
            size_t esc_at = cur.pos;
            ++cur.pos;
            if (cur.eof()) cur.fail("dangling escape", esc_at);
            char e = cur.peek();
            switch (e) {
                case 't': lex.push_back('\t'); ++cur.pos; break;
                case 'b': lex.push_back('\b'); ++cur.pos; break;
                case 'n': lex.push_back('\n'); ++cur.pos; break;
                case 'r': lex.push_back('\r'); ++cur.pos; break;
                case 'f': lex.push_back('\f'); ++cur.pos; break;
                case '"': lex.push_back('"'); ++cur.pos; break;
                case '\'': lex.push_back('\''); ++cur.pos; break;
                case '\\': lex.push_back('\\'); ++cur.pos; break;
                case 'u':
                case 'U': parse_uchar(cur, lex); break;
                default: cur.fail("unknown escape", esc_at);
            }
            continue;
        }
        lex.push_back(c);
        ++cur.pos;
    }

    if (!cur.eof() && cur.peek() == '@') {
        size_t tag_at = cur.pos;
        ++cur.pos;
        std::string tag;
        while (!cur.eof() && (std::isalpha(static_cast<unsigned char>(cur.peek())))) {
            tag.push_back(cur.peek());
            ++cur.pos;
        }
        if (tag.empty()) cur.fail("empty language tag", tag_at);
        while (!cur.eof() && cur.peek() == '-') {
            tag.push_back('-');
            ++cur.pos;
            size_t seg = 0;
            while (!cur.eof() && std::isalnum(static_cast<unsigned char>(cur.peek()))) {
                tag.push_back(cur.peek());
                ++cur.pos;
                ++seg;
            }
            if (seg == 0) cur.fail("empty language subtag", tag_at);
        }
        return Term::lang_literal(std::move(lex), std::move(tag));
    }
    if (!cur.eof() && cur.peek() == '^') {
        size_t caret_at = cur.pos;
        ++cur.pos;
        if (cur.eof() || cur.peek() != '^') cur.fail("expected '^^' before datatype", caret_at);
        ++cur.pos;
        if (cur.eof() || cur.peek() != '<') cur.fail("expected datatype IRI after '^^'", cur.pos);
        Term dt = parse_iri(cur);
        return Term::typed_literal(std::move(lex), std::move(dt.lexical));
    }
    return Term::literal(std::move(lex));
}

Term parse_term(LineCursor& cur, const char* role) {
    if (cur.eof()) cur.fail(std::string("missing ") + role);
    char c = cur.peek();
    if (c == '<') return parse_iri(cur);
    if (c == '_' && cur.pos + 1 < cur.text.size() && cur.text[cur.pos + 1] == ':')
        return parse_blank(cur);
    if (c == '"') return parse_literal(cur);
    cur.fail(std::string("expected ") + role);
}

}  // namespace

bool parse_line(std::string_view line, size_t line_no, Triple* out) {
    // Strip a trailing CR from CRLF input.
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    LineCursor cur(line, line_no);
    cur.skip_ws();
    if (cur.eof() || cur.peek() == '#') return false;

    Triple t;
    t.subject = parse_term(cur, "subject");
    if (t.subject.is_literal()) cur.fail("literal cannot be a subject", 0);
    if (!cur.require_ws()) cur.fail("expected whitespace after subject");

    if (cur.eof() || cur.peek() != '<') cur.fail("expected predicate IRI");
    t.predicate = parse_iri(cur);
    if (!cur.require_ws()) cur.fail("expected whitespace after predicate");

    t.object = parse_term(cur, "object");

    cur.skip_ws();
    if (cur.eof() || cur.peek() != '.') cur.fail("expected '.' terminator");
    ++cur.pos;
    cur.skip_ws();
    if (!cur.eof() && cur.peek() != '#') cur.fail("unexpected content after '.'");

    *out = std::move(t);
    return true;
}

ParseResult parse(std::istream& in, const ParseOptions& opts) {
    ParseResult result;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        Triple t;
        if (opts.lenient) {
            try {
                if (parse_line(line, line_no, &t)) result.triples.push_back(std::move(t));
            } catch (const ParseError&) {
                ++result.skipped;
            }
        } else {
            if (parse_line(line, line_no, &t)) result.triples.push_back(std::move(t));
        }
    }
    return result;
}

ParseResult parse_string(std::string_view text, const ParseOptions& opts) {
    std::istringstream in{std::string(text)};
    return parse(in, opts);
}

namespace {

void escape_literal_into(const std::string& lex, std::string& out) {
    for (unsigned char c : lex) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            case '\b': out += "\\b"; break;
            case '\f': out += "\\f"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04X", c);
                    out += buf;
                } else {
                    out.push_back(char(c));
                }
        }
    }
}

}  // namespace

std::string to_string(const Term& t) {
    std::string out;
    switch (t.kind) {
        case TermKind::IRI:
            out = "<" + t.lexical + ">";
            break;
        case TermKind::BlankNode:
            out = "_:" + t.lexical;
            break;
        case TermKind::Literal:
            out.push_back('"');
            escape_literal_into(t.lexical, out);
            out.push_back('"');
            if (t.language_tag) {
                out += "@" + *t.language_tag;
            } else if (t.datatype_iri) {
                out += "^^<" + *t.datatype_iri + ">";
            }
            break;
    }
    return out;
}

std::string to_line(const Triple& t) {
    return to_string(t.subject) + " " + to_string(t.predicate) + " " + to_string(t.object) + " .";
}

}  // namespace kgstroll::ntriples
