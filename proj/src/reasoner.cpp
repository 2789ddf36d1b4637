#include "pd/reasoner.hpp"

#include <algorithm>
#include <cmath>

namespace pd {

namespace {

using SupportSet = std::set<Literal>;

struct DeductionCollector {
    const std::vector<Rule>& rules;
    std::map<Literal, std::vector<int>> by_head;
    std::map<SupportSet, std::map<Literal, int>> results;

    explicit DeductionCollector(const Framework& fw) : rules(fw.rules()) {
        for (std::size_t i = 0; i < rules.size(); ++i)
            by_head[rules[i].head].push_back(static_cast<int>(i));
    }

    // Mirror of the argument leaf conditions: every leaf literal must be
    // contested and a deduction with leaves needs company in its support.
    bool qualifies(const std::map<Literal, int>& choice,
                   std::size_t support_size) const {
        for (const auto& [lit, opt] : choice) {
            if (opt >= 0) continue;
            if (!by_head.count(negated(lit))) return false;
            if (support_size <= 1) return false;
        }
        return true;
    }

    void rec(std::map<Literal, int>& decided, std::set<Literal>& pending) {
        if (pending.empty()) {
            SupportSet support;
            for (const auto& [lit, _] : decided) support.insert(lit);
            auto [it, inserted] = results.emplace(std::move(support), decided);
            // Equal supports collapse to one deduction. Prefer a witness
            // whose leaves qualify it as an argument, so a support counts
            // as an argument whenever any of its witnesses does.
            if (!inserted && !qualifies(it->second, it->first.size()) &&
                qualifies(decided, it->first.size()))
                it->second = decided;
            return;
        }
        Literal next = *pending.begin();
        pending.erase(pending.begin());
        std::vector<int> options{-1};  // leaf, then each rule for the literal
        if (auto it = by_head.find(next); it != by_head.end())
            options.insert(options.end(), it->second.begin(),
                           it->second.end());
        for (int opt : options) {
            decided.emplace(next, opt);
            std::vector<Literal> added;
            if (opt >= 0) {
                for (const Literal& bl : rules[opt].body) {
                    if (decided.count(bl) || pending.count(bl)) continue;
                    pending.insert(bl);
                    added.push_back(bl);
                }
            }
            rec(decided, pending);
            for (const Literal& bl : added) pending.erase(bl);
            decided.erase(next);
        }
        pending.insert(next);
    }
};

}  // namespace

std::vector<Deduction> enumerate_deductions(const Framework& fw,
                                            Literal claim) {
    DeductionCollector col(fw);
    std::map<Literal, int> decided;
    std::set<Literal> pending{claim};
    col.rec(decided, pending);
    std::vector<Deduction> out;
    out.reserve(col.results.size());
    for (auto& [support, choice] : col.results) {
        Deduction d;
        d.claim = claim;
        d.support.assign(support.begin(), support.end());
        d.choice = std::move(choice);
        out.push_back(std::move(d));
    }
    return out;
}

std::vector<Deduction> maximal_deductions(const Framework& fw,
                                          Literal claim) {
    std::vector<Deduction> all = enumerate_deductions(fw, claim);
    std::vector<Deduction> out;
    for (const Deduction& d : all) {
        bool strictly_contained = false;
        for (const Deduction& e : all) {
            if (d.support.size() >= e.support.size()) continue;
            if (std::includes(e.support.begin(), e.support.end(),
                              d.support.begin(), d.support.end())) {
                strictly_contained = true;
                break;
            }
        }
        if (!strictly_contained) out.push_back(d);
    }
    return out;
}

bool is_argument(const Framework& fw, const Deduction& d) {
    for (const auto& [lit, opt] : d.choice) {
        if (opt >= 0) continue;
        bool contested = false;
        Literal neg = negated(lit);
        for (const Rule& r : fw.rules())
            if (r.head == neg) {
                contested = true;
                break;
            }
        if (!contested) return false;
        if (d.support.size() <= 1) return false;
    }
    return true;
}

std::vector<Argument> enumerate_arguments(const Framework& fw) {
    std::vector<Argument> out;
    for (int atom = 0; atom < fw.atom_count(); ++atom) {
        for (bool positive : {false, true}) {
            Literal claim{atom, positive};
            for (const Deduction& d : enumerate_deductions(fw, claim))
                if (is_argument(fw, d))
                    out.push_back(Argument{claim, d.support, -1.0});
        }
    }
    std::sort(out.begin(), out.end(), [](const Argument& x, const Argument& y) {
        if (x.claim != y.claim) return x.claim < y.claim;
        return x.support < y.support;
    });
    return out;
}

std::vector<std::pair<int, int>> compute_attacks(
    const std::vector<Argument>& args) {
    std::vector<std::pair<int, int>> atts;
    for (std::size_t i = 0; i < args.size(); ++i) {
        Literal neg = negated(args[i].claim);
        for (std::size_t j = 0; j < args.size(); ++j) {
            if (std::binary_search(args[j].support.begin(),
                                   args[j].support.end(), neg))
                atts.emplace_back(static_cast<int>(i), static_cast<int>(j));
        }
    }
    return atts;
}

std::set<std::uint64_t> global_pcwa_zero_set(const Framework& fw) {
    int n = fw.atom_count();
    check_world_cap(n);
    std::uint64_t nw = world_count(n);
    std::set<std::uint64_t> zeros;
    for (const HeadGroup& g : group_heads(fw)) {
        std::vector<Deduction> supports = maximal_deductions(fw, g.head);
        for (std::uint64_t w = 0; w < nw; ++w) {
            if (!satisfies(w, n, g.head)) continue;
            bool covered = false;
            for (const Deduction& d : supports)
                if (satisfies_all(w, n, d.support)) {
                    covered = true;
                    break;
                }
            if (!covered) zeros.insert(w);
        }
    }
    return zeros;
}

std::set<std::uint64_t> local_pcwa_zero_set(const Framework& fw) {
    LinearSystem sys = build_system(fw, Mode::Pcwa);
    std::set<std::uint64_t> zeros;
    for (std::size_t i = 0; i < sys.a.size(); ++i) {
        if (sys.row_tags[i].rfind("pcwa:", 0) != 0) continue;
        for (std::uint64_t w = 0; w < sys.n_worlds; ++w)
            if (sys.a[i][w] == 1.0) zeros.insert(w);
    }
    return zeros;
}

Framework aa_to_pd(const AaGraph& g) {
    Framework fw;
    for (const std::string& name : g.arguments) fw.intern(name);
    for (std::size_t i = 0; i < g.arguments.size(); ++i) {
        std::vector<Literal> body;
        for (std::size_t att = 0; att < g.arguments.size(); ++att) {
            for (const auto& [x, y] : g.attacks)
                if (y == static_cast<int>(i) &&
                    x == static_cast<int>(att)) {
                    body.push_back(Literal{static_cast<int>(att), false});
                    break;
                }
        }
        fw.add_rule(Literal{static_cast<int>(i), true}, std::move(body), 1.0);
    }
    return fw;
}

const char* label_name(ArgLabel l) {
    switch (l) {
        case ArgLabel::In: return "in";
        case ArgLabel::Out: return "out";
        default: return "undec";
    }
}

std::vector<ArgLabel> probabilistic_labelling(const std::vector<double>& probs,
                                              double epsilon) {
    std::vector<ArgLabel> labels;
    labels.reserve(probs.size());
    for (double p : probs) {
        if (p >= 1.0 - epsilon)
            labels.push_back(ArgLabel::In);
        else if (p <= epsilon)
            labels.push_back(ArgLabel::Out);
        else
            labels.push_back(ArgLabel::Undec);
    }
    return labels;
}

bool verify_complete_labelling(const AaGraph& g,
                               const std::vector<ArgLabel>& labels) {
    std::size_t k = g.arguments.size();
    if (labels.size() != k) return false;
    std::vector<std::vector<int>> attackers(k);
    for (const auto& [x, y] : g.attacks) attackers[y].push_back(x);
    for (std::size_t i = 0; i < k; ++i) {
        int n_in = 0, n_out = 0;
        for (int x : attackers[i]) {
            if (labels[x] == ArgLabel::In) ++n_in;
            if (labels[x] == ArgLabel::Out) ++n_out;
        }
        std::size_t n_att = attackers[i].size();
        switch (labels[i]) {
            case ArgLabel::In:
                if (static_cast<std::size_t>(n_out) != n_att) return false;
                break;
            case ArgLabel::Out:
                if (n_in == 0) return false;
                break;
            case ArgLabel::Undec:
                if (n_in > 0) return false;
                if (n_att == 0) return false;
                if (static_cast<std::size_t>(n_out) == n_att) return false;
                break;
        }
    }
    return true;
}

ConsistencyReport check_consistency_by_substitution(const Framework& fw,
                                                    const Vector& pi,
                                                    double tol) {
    int n = fw.atom_count();
    ConsistencyReport rep;
    bool all_ok = true;
    const auto& rules = fw.rules();
    for (std::size_t i = 0; i < rules.size(); ++i) {
        const Rule& r = rules[i];
        RuleCheck chk;
        chk.rule = static_cast<int>(i);
        if (r.body.empty()) {
            chk.residual = std::abs(marginal(pi, n, {r.head}) - r.theta);
            chk.status = chk.residual <= tol ? "pass" : "fail";
        } else {
            double pb = marginal(pi, n, r.body);
            if (pb <= tol) {
                chk.status = "vacuous-body";
                chk.residual = pb;
            } else {
                std::vector<Literal> conj{r.head};
                conj.insert(conj.end(), r.body.begin(), r.body.end());
                chk.residual =
                    std::abs(marginal(pi, n, conj) / pb - r.theta);
                chk.status = chk.residual <= tol ? "pass" : "fail";
            }
        }
        if (chk.status == "fail") all_ok = false;
        rep.rules.push_back(std::move(chk));
    }
    double sum = 0.0, lo = 0.0, hi = 0.0;
    for (double p : pi) {
        sum += p;
        lo = std::min(lo, p);
        hi = std::max(hi, p);
    }
    rep.normalization_residual = std::abs(sum - 1.0);
    rep.box_violation = std::max(-lo, std::max(0.0, hi - 1.0));
    rep.verdict = all_ok && rep.normalization_residual <= tol &&
                  rep.box_violation <= tol;
    return rep;
}

}  // namespace pd
