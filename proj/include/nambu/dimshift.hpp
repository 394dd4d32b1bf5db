#ifndef NAMBU_DIMSHIFT_HPP
#define NAMBU_DIMSHIFT_HPP

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "nambu/graphs.hpp"
#include "nambu/parallel.hpp"
#include "nambu/polyalg.hpp"

namespace nambu {

// ---------------------------------------------------------------------
// Embedding d -> d+1: every Levi-Civita vertex gains one new terminal
// Casimir of the new species d-1, attached as the ordered last out-edge;
// no old edge moves. New labels m+(d-1)n .. m+dn-1 extend the old range,
// so all old labels are unchanged.
// ---------------------------------------------------------------------

inline MicroGraph embed(const MicroGraph& g) {
    validate_structure(g);
    MicroGraph out = g;
    out.d = g.d + 1;
    for (int t = 0; t < g.n; ++t)
        out.targets[t].push_back(g.m + (g.d - 1) * g.n + t);
    return out;
}

// Embedding followed by the species swap a^1 <-> a^2. Defined on d = 3
// input, where the swap exchanges the old Casimirs with the new ones;
// other dimensions compose embed with an explicit species permutation.
inline MicroGraph contra_embed(const MicroGraph& g) {
    if (g.d != 3)
        throw ValidationError("contra_embed is defined for d = 3 input; "
                              "use embed + permute_casimir_species otherwise");
    MicroGraph e = embed(g);
    return permute_casimir_species(e, species_swap_12(e));
}

// ---------------------------------------------------------------------
// Descendants d -> d+1: on top of the embedding, every external arrow
// into a Casimir (an out-edge whose head is a Casimir not owned by the
// issuing vertex) is Leibniz-split over its old target and the new
// species-(d-1) Casimir of the old target's parent copy. Each arrow
// splits independently, giving 2^(#external arrows) raw lifts.
// ---------------------------------------------------------------------

struct SignedMicro {
    int sign = 1;
    MicroGraph graph; // canonical (sorted tuples), repeat-free
};

namespace detail {

struct ExternalArrow {
    int vertex;      // issuing Levi-Civita index 0..n-1
    int slot;        // slot in that vertex's tuple
    int new_target;  // label of the redirect destination in d+1
};

inline std::vector<ExternalArrow> external_casimir_arrows(const MicroGraph& g) {
    std::vector<ExternalArrow> arrows;
    for (int t = 0; t < g.n; ++t) {
        int lc = g.lc_label(t);
        for (int s = 0; s < g.d; ++s) {
            int w = g.targets[t][s];
            if (!g.is_casimir(w)) continue;
            if (g.casimir_parent_index(w) == t && g.own_casimir(lc, g.casimir_species(w)) == w)
                continue; // structural own-Casimir edge, never split
            arrows.push_back({t, s, g.m + (g.d - 1) * g.n + g.casimir_parent_index(w)});
        }
    }
    return arrows;
}

} // namespace detail

inline int external_arrow_count(const MicroGraph& g) {
    return (int)detail::external_casimir_arrows(g).size();
}

// All nonzero canonicalized lifts, one per Leibniz choice, unmerged.
inline std::vector<SignedMicro> descendant_terms(const MicroGraph& g) {
    validate_structure(g);
    auto wf = is_wellformed_nambu(g);
    if (!wf.ok) throw ValidationError("descendants: " + wf.diagnostics.front());

    MicroGraph base = embed(g);
    auto arrows = detail::external_casimir_arrows(g);
    std::vector<SignedMicro> out;
    std::size_t choices = (std::size_t)1 << arrows.size();
    for (std::size_t mask = 0; mask < choices; ++mask) {
        MicroGraph lift = base;
        for (std::size_t a = 0; a < arrows.size(); ++a)
            if (mask & ((std::size_t)1 << a))
                lift.targets[arrows[a].vertex][arrows[a].slot] = arrows[a].new_target;
        CanonicalMicro c = canonicalize(lift);
        if (c.zero) continue;
        out.push_back({c.sign, c.graph});
    }
    return out;
}

inline GraphSum<MicroGraph> descendants(const MicroGraph& g,
                                        CountMode mode = CountMode::Canonical) {
    GraphSum<MicroGraph> gs;
    for (const auto& term : descendant_terms(g))
        gs.terms.push_back({Rat(term.sign), term.graph});
    return normalize_sum(gs, mode);
}

// Distinct graphs generated by a batch of signed terms under a counting
// identity; representatives are returned sorted. Coefficient cancellation
// does not remove a graph from the census.
inline std::vector<MicroGraph> distinct_graphs(const std::vector<SignedMicro>& terms,
                                               CountMode mode) {
    std::set<std::vector<std::vector<int>>> keys;
    std::map<std::vector<std::vector<int>>, MicroGraph> reps;
    for (const auto& term : terms) {
        Representative rep = representative(term.graph, mode);
        auto [it, fresh] = keys.insert(rep.graph.targets);
        if (fresh) reps.emplace(rep.graph.targets, rep.graph);
    }
    std::vector<MicroGraph> out;
    for (const auto& [key, g] : reps) out.push_back(g);
    return out;
}

inline std::vector<MicroGraph> distinct_descendants(const MicroGraph& g,
                                                    CountMode mode = CountMode::Canonical) {
    return distinct_graphs(descendant_terms(g), mode);
}

// ---------------------------------------------------------------------
// Expansion of Kontsevich wedge graphs into Nambu micro-graphs over a
// given d >= 3. Each wedge becomes a Levi-Civita vertex with d-2 fresh
// own Casimirs; the two wedge out-edges keep their targets; every arrow
// entering a wedge is Leibniz-distributed over that copy's rho vertex and
// each of its d-2 Casimirs, independently per arrow.
// ---------------------------------------------------------------------

namespace detail {

struct WedgeInArrow {
    int vertex; // issuing wedge index 0..n-1
    int slot;   // 0 = left, 1 = right
    int head;   // wedge label the arrow enters
};

} // namespace detail

inline std::vector<SignedMicro> expansion_terms(const KontsevichGraph& k, int d) {
    if (d < 3) throw ValidationError("kontsevich_expand requires d >= 3");
    validate_structure(k);

    std::vector<detail::WedgeInArrow> arrows;
    for (int t = 0; t < k.n; ++t)
        for (int s = 0; s < 2; ++s)
            if (k.wedges[t][s] >= k.m)
                arrows.push_back({t, s, k.wedges[t][s]});

    MicroGraph base;
    base.d = d;
    base.m = k.m;
    base.n = k.n;
    base.targets.assign(k.n, {});
    for (int t = 0; t < k.n; ++t) {
        auto& tup = base.targets[t];
        tup.push_back(k.wedges[t][0]);
        tup.push_back(k.wedges[t][1]);
        for (int sp = 1; sp <= d - 2; ++sp)
            tup.push_back(base.own_casimir(base.lc_label(t), sp));
    }

    // Per in-arrow: keep the rho vertex (choice 0) or move onto one of the
    // d-2 Casimirs of the head copy (choices 1..d-2).
    std::vector<SignedMicro> out;
    std::vector<int> choice(arrows.size(), 0);
    for (;;) {
        MicroGraph lift = base;
        for (std::size_t a = 0; a < arrows.size(); ++a)
            if (choice[a] > 0)
                lift.targets[arrows[a].vertex][arrows[a].slot] =
                    base.own_casimir(arrows[a].head, choice[a]);
        CanonicalMicro c = canonicalize(lift);
        if (!c.zero) out.push_back({c.sign, c.graph});

        int i = (int)arrows.size() - 1;
        while (i >= 0 && choice[i] == d - 2) choice[i--] = 0;
        if (i < 0) break;
        ++choice[i];
    }
    return out;
}

inline std::vector<SignedMicro> expansion_terms(const GraphSum<KontsevichGraph>& gs,
                                                int d, std::vector<Rat>* weights = nullptr) {
    check_same_signature(gs);
    std::vector<SignedMicro> all;
    for (const auto& term : gs.terms) {
        auto part = expansion_terms(term.graph, d);
        for (auto& p : part) {
            all.push_back(p);
            if (weights) weights->push_back(term.coeff * Rat(p.sign));
        }
    }
    return all;
}

inline GraphSum<MicroGraph> kontsevich_expand(const GraphSum<KontsevichGraph>& gs, int d,
                                              CountMode mode = CountMode::Canonical) {
    GraphSum<MicroGraph> sum;
    for (const auto& term : gs.terms)
        for (const auto& p : expansion_terms(term.graph, d))
            sum.terms.push_back({term.coeff * Rat(p.sign), p.graph});
    if (sum.terms.empty()) throw ValidationError("kontsevich_expand: empty expansion");
    return normalize_sum(sum, mode);
}

inline std::vector<MicroGraph> distinct_expansion(const GraphSum<KontsevichGraph>& gs,
                                                  int d,
                                                  CountMode mode = CountMode::Canonical) {
    return distinct_graphs(expansion_terms(gs, d), mode);
}

// ---------------------------------------------------------------------
// Vanishing filter: each graph evaluated independently.
// ---------------------------------------------------------------------

inline std::vector<std::size_t> vanishing_indices(const std::vector<MicroGraph>& graphs,
                                                  int threads = 1) {
    std::vector<char> vanish(graphs.size(), 0);
    parallel_for_each(graphs.size(), threads,
                      [&](std::size_t i) { vanish[i] = is_vanishing(graphs[i]) ? 1 : 0; });
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < graphs.size(); ++i)
        if (vanish[i]) out.push_back(i);
    return out;
}

inline std::vector<MicroGraph> vanishing_subset(const std::vector<MicroGraph>& graphs,
                                                int threads = 1) {
    std::vector<MicroGraph> out;
    for (std::size_t i : vanishing_indices(graphs, threads)) out.push_back(graphs[i]);
    return out;
}

} // namespace nambu

#endif
