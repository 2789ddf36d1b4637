#include "pd/model.hpp"

#include <algorithm>
#include <cstdlib>

namespace pd {

int Framework::intern(const std::string& name) {
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    int idx = static_cast<int>(names_.size());
    names_.push_back(name);
    index_.emplace(name, idx);
    return idx;
}

int Framework::find_atom(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
}

void Framework::add_rule(Literal head, std::vector<Literal> body, double theta,
                         SourceSpan span) {
    auto check = [&](Literal l) {
        if (l.atom < 0 || l.atom >= atom_count())
            throw Error("rule references atom index " + std::to_string(l.atom) +
                            " outside the language",
                        span);
    };
    check(head);
    if (theta < 0.0 || theta > 1.0)
        throw Error("probability " + std::to_string(theta) +
                        " outside [0, 1]",
                    span);
    std::vector<Literal> dedup;
    for (const Literal& l : body) {
        check(l);
        bool seen = false;
        for (const Literal& d : dedup) {
            if (d.atom == l.atom) {
                if (d.positive != l.positive)
                    throw Error("body contains both " + literal_name(l) +
                                    " and its negation",
                                span);
                seen = true;
            }
        }
        if (!seen) dedup.push_back(l);
    }
    if (theta == 0.0) {
        head = negated(head);
        theta = 1.0;
    }
    rules_.push_back(Rule{head, std::move(dedup), theta});
}

std::string Framework::literal_name(Literal l) const {
    std::string s = l.positive ? "" : "~";
    if (l.atom >= 0 && l.atom < atom_count())
        s += names_[l.atom];
    else
        s += "atom" + std::to_string(l.atom);
    return s;
}

std::uint64_t world_count(int n_atoms) {
    return std::uint64_t{1} << n_atoms;
}

bool satisfies(std::uint64_t world, int n_atoms, Literal l) {
    bool bit = (world >> (n_atoms - 1 - l.atom)) & 1u;
    return bit == l.positive;
}

bool satisfies_all(std::uint64_t world, int n_atoms,
                   const std::vector<Literal>& conj) {
    for (const Literal& l : conj)
        if (!satisfies(world, n_atoms, l)) return false;
    return true;
}

double marginal(const std::vector<double>& pi, int n_atoms,
                const std::vector<Literal>& conj) {
    double sum = 0.0;
    for (std::uint64_t w = 0; w < pi.size(); ++w)
        if (satisfies_all(w, n_atoms, conj)) sum += pi[w];
    return sum;
}

int world_cap() {
    if (const char* env = std::getenv("PD_WORLD_CAP")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<int>(std::min(v, 62L));
    }
    return 24;
}

void check_world_cap(int n_atoms) {
    int cap = world_cap();
    if (n_atoms > cap)
        throw LimitError("language has " + std::to_string(n_atoms) +
                         " atoms, above the world cap of " +
                         std::to_string(cap) +
                         " (set PD_WORLD_CAP to raise it)");
}

}  // namespace pd
