#include "pd/builder.hpp"

#include <algorithm>
#include <set>

namespace pd {

Mode mode_from_string(const std::string& s) {
    if (s == "owa") return Mode::Owa;
    if (s == "pcwa") return Mode::Pcwa;
    throw Error("unknown mode \"" + s + "\" (expected owa or pcwa)");
}

const char* mode_name(Mode m) {
    return m == Mode::Owa ? "owa" : "pcwa";
}

LinearSystem build_owa(const Framework& fw) {
    check_world_cap(fw.atom_count());
    int n = fw.atom_count();
    std::size_t nw = world_count(n);
    LinearSystem sys;
    sys.n_atoms = n;
    sys.n_worlds = nw;
    const auto& rules = fw.rules();
    for (std::size_t i = 0; i < rules.size(); ++i) {
        const Rule& r = rules[i];
        Vector row(nw, 0.0);
        if (r.body.empty()) {
            for (std::uint64_t w = 0; w < nw; ++w)
                if (satisfies(w, n, r.head)) row[w] = 1.0;
            sys.b.push_back(r.theta);
        } else {
            for (std::uint64_t w = 0; w < nw; ++w) {
                if (!satisfies_all(w, n, r.body)) continue;
                row[w] = satisfies(w, n, r.head) ? r.theta - 1.0 : r.theta;
            }
            sys.b.push_back(0.0);
        }
        sys.a.push_back(std::move(row));
        sys.row_tags.push_back("rule:" + std::to_string(i));
    }
    sys.a.emplace_back(nw, 1.0);
    sys.b.push_back(1.0);
    sys.row_tags.push_back("normalization");
    return sys;
}

std::vector<HeadGroup> group_heads(const Framework& fw) {
    std::vector<HeadGroup> groups;
    for (const Rule& r : fw.rules()) {
        HeadGroup* g = nullptr;
        for (HeadGroup& existing : groups)
            if (existing.head == r.head) g = &existing;
        if (!g) {
            groups.push_back(HeadGroup{r.head, {}});
            g = &groups.back();
        }
        g->bodies.push_back(r.body);
    }
    return groups;
}

namespace {

std::vector<std::set<Literal>> drop_subsumed_bodies(
    const std::vector<std::vector<Literal>>& bodies) {
    std::vector<std::set<Literal>> sets;
    sets.reserve(bodies.size());
    for (const auto& b : bodies) sets.emplace_back(b.begin(), b.end());
    std::vector<std::set<Literal>> keep;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        bool strict_subset = false;
        for (std::size_t j = 0; j < sets.size(); ++j) {
            if (i == j || sets[i].size() >= sets[j].size()) continue;
            if (std::includes(sets[j].begin(), sets[j].end(), sets[i].begin(),
                              sets[i].end())) {
                strict_subset = true;
                break;
            }
        }
        if (strict_subset) continue;
        if (std::find(keep.begin(), keep.end(), sets[i]) != keep.end())
            continue;
        keep.push_back(sets[i]);
    }
    return keep;
}

}  // namespace

void append_pcwa_rows(LinearSystem& sys, const Framework& fw) {
    int n = sys.n_atoms;
    std::size_t nw = sys.n_worlds;
    for (const HeadGroup& g : group_heads(fw)) {
        std::vector<std::vector<Literal>> terms;
        for (const auto& body : drop_subsumed_bodies(g.bodies)) {
            std::vector<Literal> term{g.head};
            term.insert(term.end(), body.begin(), body.end());
            terms.push_back(std::move(term));
        }
        Vector row(nw, 0.0);
        for (std::uint64_t w = 0; w < nw; ++w) {
            if (!satisfies(w, n, g.head)) continue;
            bool covered = false;
            for (const auto& t : terms)
                if (satisfies_all(w, n, t)) {
                    covered = true;
                    break;
                }
            if (!covered) row[w] = 1.0;
        }
        sys.a.push_back(std::move(row));
        sys.b.push_back(0.0);
        sys.row_tags.push_back("pcwa:" + fw.literal_name(g.head));
    }
}

LinearSystem build_system(const Framework& fw, Mode mode) {
    LinearSystem sys = build_owa(fw);
    if (mode == Mode::Pcwa) append_pcwa_rows(sys, fw);
    return sys;
}

AugmentedSystem build_lagrange_augmented(const LinearSystem& sys) {
    std::size_t m = sys.a.size();
    std::size_t nw = sys.n_worlds;
    AugmentedSystem aug;
    aug.n_worlds = nw;
    aug.a.reserve(m + nw);
    for (std::size_t i = 0; i < m; ++i) {
        Vector row(nw + m, 0.0);
        std::copy(sys.a[i].begin(), sys.a[i].end(), row.begin());
        aug.a.push_back(std::move(row));
        aug.b.push_back(sys.b[i]);
    }
    for (std::size_t w = 0; w < nw; ++w) {
        Vector row(nw + m, 0.0);
        row[w] = 1.0;
        for (std::size_t i = 0; i < m; ++i) row[nw + i] = -sys.a[i][w];
        aug.a.push_back(std::move(row));
        aug.b.push_back(0.0);
    }
    return aug;
}

}  // namespace pd
