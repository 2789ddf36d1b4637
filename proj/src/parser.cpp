#include "pd/parser.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace pd {

namespace {

struct Scanner {
    const std::string& text;
    std::size_t pos = 0;
    int line = 1;
    int column = 1;

    explicit Scanner(const std::string& t) : text(t) {}

    bool eof() const { return pos >= text.size(); }
    char peek() const { return eof() ? '\0' : text[pos]; }

    char advance() {
        char c = text[pos++];
        if (c == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
        return c;
    }

    SourceSpan here() const { return SourceSpan{line, column}; }

    void skip_space_and_comments() {
        while (!eof()) {
            char c = peek();
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '#') {
                while (!eof() && peek() != '\n') advance();
            } else {
                break;
            }
        }
    }

    [[noreturn]] void fail(const std::string& msg, SourceSpan at) const {
        throw ParseError(msg + " at line " + std::to_string(at.line) +
                             ", column " + std::to_string(at.column),
                         at);
    }

    void expect(char c, const char* what) {
        SourceSpan at = here();
        if (eof() || peek() != c)
            fail(std::string("expected ") + what, at);
        advance();
    }

    bool match(char c) {
        if (!eof() && peek() == c) {
            advance();
            return true;
        }
        return false;
    }

    static bool ident_start(char c) {
        return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
    }
    static bool ident_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    }

    std::string identifier() {
        SourceSpan at = here();
        if (eof() || !ident_start(peek()))
            fail("expected a name", at);
        std::string s;
        while (!eof() && ident_char(peek())) s += advance();
        return s;
    }

    // Plain decimal: digits with at most one '.', where the dot counts as
    // part of the number only when a digit follows. That keeps the rule
    // terminator out of "0.8.".
    double number() {
        SourceSpan at = here();
        std::string s;
        while (!eof() && std::isdigit(static_cast<unsigned char>(peek())))
            s += advance();
        if (!eof() && peek() == '.' && pos + 1 < text.size() &&
            std::isdigit(static_cast<unsigned char>(text[pos + 1]))) {
            s += advance();
            while (!eof() && std::isdigit(static_cast<unsigned char>(peek())))
                s += advance();
        }
        if (s.empty()) fail("expected a number", at);
        return std::stod(s);
    }
};

Literal read_literal(Scanner& sc, Framework& fw) {
    bool positive = !sc.match('~');
    sc.skip_space_and_comments();
    std::string name = sc.identifier();
    return Literal{fw.intern(name), positive};
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::string format_theta(double theta) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", theta);
    std::string s = buf;
    if (s.find('e') == std::string::npos && s.find('E') == std::string::npos)
        return s;
    // tiny values come out in exponent notation, which the grammar does not
    // accept; print them as a plain decimal instead
    std::snprintf(buf, sizeof buf, "%.17f", theta);
    s = buf;
    while (s.size() > 1 && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

}  // namespace

Framework parse_pd(const std::string& text) {
    Framework fw;
    Scanner sc(text);
    for (;;) {
        sc.skip_space_and_comments();
        if (sc.eof()) break;
        SourceSpan rule_at = sc.here();
        Literal head = read_literal(sc, fw);
        sc.skip_space_and_comments();
        SourceSpan arrow_at = sc.here();
        if (!(sc.match('<') && sc.match('-')))
            sc.fail("expected \"<-\"", arrow_at);
        std::vector<Literal> body;
        sc.skip_space_and_comments();
        if (sc.peek() != ':') {
            for (;;) {
                sc.skip_space_and_comments();
                SourceSpan lit_at = sc.here();
                Literal l = read_literal(sc, fw);
                for (const Literal& seen : body)
                    if (seen.atom == l.atom && seen.positive != l.positive)
                        sc.fail("body contains both " + fw.literal_name(l) +
                                    " and its negation",
                                lit_at);
                body.push_back(l);
                sc.skip_space_and_comments();
                if (!sc.match(',')) break;
            }
        }
        sc.skip_space_and_comments();
        sc.expect(':', "\":\"");
        sc.skip_space_and_comments();
        SourceSpan num_at = sc.here();
        double theta = sc.number();
        if (theta < 0.0 || theta > 1.0)
            sc.fail("probability " + format_theta(theta) + " outside [0, 1]",
                    num_at);
        sc.skip_space_and_comments();
        sc.expect('.', "\".\" to end the rule");
        fw.add_rule(head, std::move(body), theta, rule_at);
    }
    return fw;
}

Framework parse_pd_file(const std::string& path) {
    return parse_pd(read_file(path));
}

std::string serialize_pd(const Framework& fw) {
    std::string out;
    for (const Rule& r : fw.rules()) {
        out += fw.literal_name(r.head);
        out += " <-";
        for (std::size_t i = 0; i < r.body.size(); ++i) {
            out += i ? ", " : " ";
            out += fw.literal_name(r.body[i]);
        }
        out += " : ";
        out += format_theta(r.theta);
        out += ".\n";
    }
    return out;
}

AaGraph parse_aa(const std::string& text) {
    // two passes over the statement list so attacks may precede declarations
    struct Stmt {
        bool is_arg;
        std::string a, b;
        SourceSpan at;
    };
    std::vector<Stmt> stmts;
    Scanner sc(text);
    for (;;) {
        sc.skip_space_and_comments();
        if (sc.eof()) break;
        SourceSpan at = sc.here();
        std::string kw = sc.identifier();
        if (kw != "arg" && kw != "att")
            sc.fail("expected \"arg\" or \"att\", got \"" + kw + "\"", at);
        sc.skip_space_and_comments();
        sc.expect('(', "\"(\"");
        sc.skip_space_and_comments();
        std::string a = sc.identifier();
        std::string b;
        if (kw == "att") {
            sc.skip_space_and_comments();
            sc.expect(',', "\",\"");
            sc.skip_space_and_comments();
            b = sc.identifier();
        }
        sc.skip_space_and_comments();
        sc.expect(')', "\")\"");
        sc.skip_space_and_comments();
        sc.expect('.', "\".\"");
        stmts.push_back(Stmt{kw == "arg", a, b, at});
    }

    AaGraph g;
    std::unordered_map<std::string, int> index;
    for (const Stmt& s : stmts) {
        if (!s.is_arg) continue;
        if (index.count(s.a))
            throw ParseError("duplicate declaration of argument \"" + s.a +
                                 "\" at line " + std::to_string(s.at.line),
                             s.at);
        index.emplace(s.a, static_cast<int>(g.arguments.size()));
        g.arguments.push_back(s.a);
    }
    for (const Stmt& s : stmts) {
        if (s.is_arg) continue;
        auto ia = index.find(s.a);
        auto ib = index.find(s.b);
        if (ia == index.end() || ib == index.end())
            throw ParseError("attack references undeclared argument \"" +
                                 (ia == index.end() ? s.a : s.b) +
                                 "\" at line " + std::to_string(s.at.line),
                             s.at);
        g.attacks.emplace_back(ia->second, ib->second);
    }
    return g;
}

AaGraph parse_aa_file(const std::string& path) {
    return parse_aa(read_file(path));
}

std::string serialize_aa(const AaGraph& g) {
    std::string out;
    for (const std::string& a : g.arguments) out += "arg(" + a + ").\n";
    for (const auto& [x, y] : g.attacks)
        out += "att(" + g.arguments[x] + "," + g.arguments[y] + ").\n";
    return out;
}

}  // namespace pd
