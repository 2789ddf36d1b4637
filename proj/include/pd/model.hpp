#pragma once
// Language, p-rules, possible worlds, and marginalization primitives.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace pd {

struct SourceSpan {
    int line = 0;  // 1-based; 0 means not tied to source text
    int column = 0;
};

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg, SourceSpan where = {})
        : std::runtime_error(msg), span(where) {}
    SourceSpan span;
};

class ParseError : public Error {
public:
    using Error::Error;
};

// Raised when a request is well-formed but has no answer under the chosen
// semantics (infeasible rule set, failed labelling verification).
class SemanticError : public Error {
public:
    using Error::Error;
};

class LimitError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

struct Literal {
    int atom = 0;
    bool positive = true;

    friend bool operator==(const Literal&, const Literal&) = default;
    friend auto operator<=>(const Literal&, const Literal&) = default;
};

inline Literal negated(Literal l) { return Literal{l.atom, !l.positive}; }

struct Rule {
    Literal head;
    std::vector<Literal> body;
    double theta = 1.0;
};

// Language plus rule set. Atoms are interned in first-appearance order and
// referenced by index everywhere else.
class Framework {
public:
    int intern(const std::string& name);
    int find_atom(const std::string& name) const;  // -1 when absent

    // Applies the ingestion rewrites: duplicate body literals collapse, a
    // body carrying an atom with both signs is rejected, and theta 0 turns
    // into the negated head at theta 1.
    void add_rule(Literal head, std::vector<Literal> body, double theta,
                  SourceSpan span = {});

    int atom_count() const { return static_cast<int>(names_.size()); }
    const std::vector<std::string>& atom_names() const { return names_; }
    const std::vector<Rule>& rules() const { return rules_; }
    std::string literal_name(Literal l) const;

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, int> index_;
    std::vector<Rule> rules_;
};

// Worlds are indices 0..2^n-1 with atom i at bit (n-1-i): world 0 is the
// all-false assignment and enumeration follows truth-table order.
std::uint64_t world_count(int n_atoms);
bool satisfies(std::uint64_t world, int n_atoms, Literal l);
bool satisfies_all(std::uint64_t world, int n_atoms,
                   const std::vector<Literal>& conj);
double marginal(const std::vector<double>& pi, int n_atoms,
                const std::vector<Literal>& conj);

// Joint distributions materialize all 2^n worlds, so the language size is
// capped. PD_WORLD_CAP overrides the default of 24 atoms.
int world_cap();
void check_world_cap(int n_atoms);

}  // namespace pd
