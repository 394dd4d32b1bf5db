#ifndef NAMBU_GRAPHS_HPP
#define NAMBU_GRAPHS_HPP

#include <algorithm>
#include <array>
#include <cctype>
#include <compare>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nambu/perm.hpp"
#include "nambu/rational.hpp"

namespace nambu {

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dimension-agnostic wedge graph: m ordered sinks 0..m-1, n wedge tops
// m..m+n-1, each wedge an ordered pair (left, right) of targets. Swapping
// the two entries of a pair flips the sign of the graph; it is never a
// distinct graph.
struct KontsevichGraph {
    int m = 0;
    int n = 0;
    std::vector<std::array<int, 2>> wedges;

    int vertex_count() const { return m + n; }
    auto operator<=>(const KontsevichGraph&) const = default;
};

// Nambu micro-graph over dimension d: m sinks 0..m-1, n Levi-Civita
// vertices m..m+n-1, and Casimir vertices in species blocks; the a^k
// Casimir of Levi-Civita vertex v sits at label v + k*n. Each Levi-Civita
// vertex carries an ordered d-tuple of out-edge targets.
struct MicroGraph {
    int d = 0;
    int m = 0;
    int n = 0;
    std::vector<std::vector<int>> targets; // n tuples of length d

    int vertex_count() const { return m + (d - 1) * n; }
    int species_count() const { return d - 2; }
    bool is_sink(int v) const { return v >= 0 && v < m; }
    bool is_lc(int v) const { return v >= m && v < m + n; }
    bool is_casimir(int v) const { return v >= m + n && v < vertex_count(); }
    int casimir_species(int v) const { return (v - m) / n; }          // 1..d-2
    int casimir_parent_index(int v) const { return (v - m) % n; }     // 0..n-1
    int lc_label(int t) const { return m + t; }
    int own_casimir(int lc, int species) const { return lc + species * n; }

    auto operator<=>(const MicroGraph&) const = default;
};

// ---------------------------------------------------------------------
// Structural validation and Nambu well-formedness
// ---------------------------------------------------------------------

inline void validate_structure(const KontsevichGraph& g) {
    if (g.m < 0 || g.n < 0) throw ValidationError("negative m or n");
    if ((int)g.wedges.size() != g.n)
        throw ValidationError("expected " + std::to_string(g.n) + " wedge pairs, got " +
                              std::to_string(g.wedges.size()));
    for (const auto& w : g.wedges)
        for (int v : w)
            if (v < 0 || v >= g.vertex_count())
                throw ValidationError("target " + std::to_string(v) + " out of range");
}

inline void validate_structure(const MicroGraph& g) {
    if (g.d < 2) throw ValidationError("dimension must be >= 2");
    if (g.m < 0 || g.n <= 0) throw ValidationError("bad m or n");
    if ((int)g.targets.size() != g.n)
        throw ValidationError("expected " + std::to_string(g.n) + " tuples, got " +
                              std::to_string(g.targets.size()));
    for (const auto& tup : g.targets) {
        if ((int)tup.size() != g.d)
            throw ValidationError("tuple arity " + std::to_string(tup.size()) +
                                  ", expected " + std::to_string(g.d));
        for (int v : tup)
            if (v < 0 || v >= g.vertex_count())
                throw ValidationError("target " + std::to_string(v) + " out of range");
    }
}

struct WellformedResult {
    bool ok = true;
    std::vector<std::string> diagnostics;
    explicit operator bool() const { return ok; }
};

// A structurally valid micro-graph is Nambu iff every Levi-Civita tuple
// contains each of its own d-2 Casimirs exactly once (which also forces
// in-degree >= 1 on every Casimir vertex).
inline WellformedResult is_wellformed_nambu(const MicroGraph& g) {
    WellformedResult r;
    for (int t = 0; t < g.n; ++t) {
        int lc = g.lc_label(t);
        for (int k = 1; k <= g.species_count(); ++k) {
            int own = g.own_casimir(lc, k);
            int hits = 0;
            for (int v : g.targets[t])
                if (v == own) ++hits;
            if (hits == 0) {
                r.ok = false;
                r.diagnostics.push_back("vertex " + std::to_string(lc) +
                                        ": missing own Casimir " + std::to_string(own));
            } else if (hits > 1) {
                r.ok = false;
                r.diagnostics.push_back("vertex " + std::to_string(lc) +
                                        ": duplicate own-Casimir slot " + std::to_string(own));
            }
        }
    }
    std::vector<int> indeg(g.vertex_count(), 0);
    for (const auto& tup : g.targets)
        for (int v : tup) ++indeg[v];
    for (int v = g.m + g.n; v < g.vertex_count(); ++v)
        if (indeg[v] == 0) {
            r.ok = false;
            r.diagnostics.push_back("Casimir vertex " + std::to_string(v) + " has in-degree 0");
        }
    return r;
}

// ---------------------------------------------------------------------
// Text encoding: graph := "(" tuple (";" tuple)* ")", tuple := int ("," int)*
// ---------------------------------------------------------------------

enum class GraphKind { Kontsevich, Micro };

namespace detail {

inline std::vector<std::vector<int>> parse_tuple_list(const std::string& text) {
    std::vector<std::vector<int>> tuples;
    std::size_t i = 0;
    auto skip_ws = [&] {
        while (i < text.size() && std::isspace((unsigned char)text[i])) ++i;
    };
    auto expect = [&](char c) {
        skip_ws();
        if (i >= text.size() || text[i] != c)
            throw ValidationError(std::string("expected '") + c + "' at position " +
                                  std::to_string(i) + " in '" + text + "'");
        ++i;
    };
    auto read_int = [&]() -> int {
        skip_ws();
        std::size_t start = i;
        if (i < text.size() && (text[i] == '-' || text[i] == '+')) ++i;
        while (i < text.size() && std::isdigit((unsigned char)text[i])) ++i;
        if (i == start) throw ValidationError("expected integer at position " +
                                              std::to_string(i) + " in '" + text + "'");
        return std::stoi(text.substr(start, i - start));
    };
    expect('(');
    for (;;) {
        std::vector<int> tup;
        tup.push_back(read_int());
        skip_ws();
        while (i < text.size() && text[i] == ',') {
            ++i;
            tup.push_back(read_int());
            skip_ws();
        }
        tuples.push_back(std::move(tup));
        skip_ws();
        if (i < text.size() && text[i] == ';') {
            ++i;
            continue;
        }
        break;
    }
    expect(')');
    skip_ws();
    if (i != text.size())
        throw ValidationError("trailing characters after ')' in '" + text + "'");
    return tuples;
}

} // namespace detail

inline KontsevichGraph parse_kontsevich(const std::string& text, int m, int n,
                                        bool one_based = false) {
    auto tuples = detail::parse_tuple_list(text);
    KontsevichGraph g;
    g.m = m;
    g.n = n;
    for (auto& tup : tuples) {
        if (tup.size() != 2)
            throw ValidationError("tuple arity " + std::to_string(tup.size()) +
                                  ", expected 2");
        if (one_based)
            for (int& v : tup) --v;
        g.wedges.push_back({tup[0], tup[1]});
    }
    validate_structure(g);
    return g;
}

inline MicroGraph parse_micro(const std::string& text, int d, int m, int n,
                              bool one_based = false) {
    auto tuples = detail::parse_tuple_list(text);
    MicroGraph g;
    g.d = d;
    g.m = m;
    g.n = n;
    if (one_based)
        for (auto& tup : tuples)
            for (int& v : tup) --v;
    g.targets = std::move(tuples);
    validate_structure(g);
    auto wf = is_wellformed_nambu(g);
    if (!wf.ok) throw ValidationError(wf.diagnostics.front());
    return g;
}

inline std::string serialize_encoding(const std::vector<std::vector<int>>& tuples) {
    std::string s = "(";
    for (std::size_t t = 0; t < tuples.size(); ++t) {
        if (t) s += ';';
        for (std::size_t j = 0; j < tuples[t].size(); ++j) {
            if (j) s += ',';
            s += std::to_string(tuples[t][j]);
        }
    }
    s += ')';
    return s;
}

inline std::string serialize_encoding(const MicroGraph& g) {
    return serialize_encoding(g.targets);
}

inline std::string serialize_encoding(const KontsevichGraph& g) {
    std::vector<std::vector<int>> tuples;
    for (const auto& w : g.wedges) tuples.push_back({w[0], w[1]});
    return serialize_encoding(tuples);
}

// ---------------------------------------------------------------------
// Canonical form: sort every tuple ascending, sign = product of sorting
// parities. A repeated target inside one tuple kills the graph outright
// (the Levi-Civita antisymmetry against the symmetric derivative product).
// ---------------------------------------------------------------------

struct CanonicalMicro {
    MicroGraph graph;
    int sign = 1;
    bool zero = false;
};

inline CanonicalMicro canonicalize(const MicroGraph& g) {
    CanonicalMicro r;
    r.graph = g;
    for (auto& tup : r.graph.targets) {
        if (has_repeat(tup)) {
            r.zero = true;
            r.sign = 0;
            return r;
        }
        r.sign *= sort_parity(tup);
        std::sort(tup.begin(), tup.end());
    }
    return r;
}

struct CanonicalKontsevich {
    KontsevichGraph graph;
    int sign = 1;
    bool zero = false;
};

inline CanonicalKontsevich canonicalize(const KontsevichGraph& g) {
    CanonicalKontsevich r;
    r.graph = g;
    for (auto& w : r.graph.wedges) {
        if (w[0] == w[1]) {
            r.zero = true;
            r.sign = 0;
            return r;
        }
        if (w[0] > w[1]) {
            std::swap(w[0], w[1]);
            r.sign = -r.sign;
        }
    }
    return r;
}

// ---------------------------------------------------------------------
// Signed automorphisms: permutations of the Levi-Civita vertices (sinks
// stay put, Casimirs follow their parents via v + k*n) that map the
// canonical graph to itself. The sign is the product over vertices of the
// parity of the slot re-sort after relabelling.
// ---------------------------------------------------------------------

struct SignedAutomorphism {
    std::vector<int> lc_permutation; // t -> sigma(t), indices 0..n-1
    int sign = 1;
};

namespace detail {

// Relabel under an LC permutation and re-sort; returns targets and sign,
// or nullopt if some tuple acquires a repeat (cannot happen for repeat-free
// input since relabelling is a bijection, kept for safety).
inline std::optional<std::pair<std::vector<std::vector<int>>, int>>
relabelled_sorted(const MicroGraph& g, const std::vector<int>& sigma,
                  const std::vector<int>& species_map) {
    auto map_label = [&](int v) -> int {
        if (g.is_sink(v)) return v;
        if (g.is_lc(v)) return g.m + sigma[v - g.m];
        int k = g.casimir_species(v);
        int p = g.casimir_parent_index(v);
        return g.m + species_map[k] * g.n + sigma[p];
    };
    std::vector<std::vector<int>> out(g.n);
    int sign = 1;
    for (int t = 0; t < g.n; ++t) {
        std::vector<int> tup(g.d);
        for (int s = 0; s < g.d; ++s) tup[s] = map_label(g.targets[t][s]);
        if (has_repeat(tup)) return std::nullopt;
        sign *= sort_parity(tup);
        std::sort(tup.begin(), tup.end());
        out[sigma[t]] = std::move(tup);
    }
    return std::make_pair(std::move(out), sign);
}

inline std::vector<int> identity_species_map(const MicroGraph& g) {
    std::vector<int> id(g.species_count() + 1);
    std::iota(id.begin(), id.end(), 0);
    return id;
}

} // namespace detail

inline std::vector<SignedAutomorphism> automorphisms(const MicroGraph& graph) {
    CanonicalMicro c = canonicalize(graph);
    if (c.zero)
        throw ValidationError("automorphisms: graph has a repeated-target tuple");
    const MicroGraph& g = c.graph;
    auto species_id = detail::identity_species_map(g);
    std::vector<SignedAutomorphism> out;
    std::vector<int> sigma(g.n);
    std::iota(sigma.begin(), sigma.end(), 0);
    do {
        auto cand = detail::relabelled_sorted(g, sigma, species_id);
        if (cand && cand->first == g.targets)
            out.push_back({sigma, cand->second});
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return out;
}

// True iff some automorphism carries sign -1; such a graph equals minus
// itself, so its formula vanishes identically.
inline bool is_zero_by_symmetry(const MicroGraph& graph,
                                SignedAutomorphism* witness = nullptr) {
    for (const auto& a : automorphisms(graph))
        if (a.sign < 0) {
            if (witness) *witness = a;
            return true;
        }
    return false;
}

// ---------------------------------------------------------------------
// Casimir species permutation: relabels v + k*n -> v + perm(k)*n. Slot
// order is preserved, so applying a transposition twice is the identity.
// ---------------------------------------------------------------------

inline MicroGraph permute_casimir_species(const MicroGraph& g,
                                          const std::vector<int>& perm) {
    // perm is indexed 1..d-2 (entry 0 unused).
    if ((int)perm.size() != g.species_count() + 1)
        throw ValidationError("species permutation must cover 1..d-2");
    if (g.d == 3 && perm[1] != 1)
        throw ValidationError("d=3 admits only the identity species permutation");
    std::vector<bool> seen(perm.size(), false);
    for (int k = 1; k <= g.species_count(); ++k) {
        if (perm[k] < 1 || perm[k] > g.species_count() || seen[perm[k]])
            throw ValidationError("not a permutation of species 1..d-2");
        seen[perm[k]] = true;
    }
    MicroGraph out = g;
    for (auto& tup : out.targets)
        for (int& v : tup)
            if (g.is_casimir(v)) {
                int k = g.casimir_species(v);
                v = g.m + perm[k] * g.n + g.casimir_parent_index(v);
            }
    return out;
}

inline std::vector<int> species_swap_12(const MicroGraph& g) {
    std::vector<int> perm(g.species_count() + 1);
    std::iota(perm.begin(), perm.end(), 0);
    if (g.species_count() >= 2) std::swap(perm[1], perm[2]);
    return perm;
}

// ---------------------------------------------------------------------
// Graph identity for counting. Raw: the sorted-tuple encoding itself.
// Canonical: minimum lexicographic representative over all n! signed
// Levi-Civita relabellings. Iso: additionally minimized over Casimir
// species permutations.
// ---------------------------------------------------------------------

enum class CountMode { Raw, Canonical, Iso };

inline const char* to_string(CountMode m) {
    switch (m) {
        case CountMode::Raw: return "raw";
        case CountMode::Canonical: return "canonical";
        case CountMode::Iso: return "iso";
    }
    return "?";
}

inline std::optional<CountMode> parse_count_mode(const std::string& s) {
    if (s == "raw") return CountMode::Raw;
    if (s == "canonical") return CountMode::Canonical;
    if (s == "iso") return CountMode::Iso;
    return std::nullopt;
}

struct Representative {
    MicroGraph graph;
    int sign = 1; // input = sign * representative (as formulas)
};

inline Representative representative(const MicroGraph& graph, CountMode mode) {
    CanonicalMicro c = canonicalize(graph);
    if (c.zero)
        throw ValidationError("representative: graph has a repeated-target tuple");
    if (mode == CountMode::Raw) return {c.graph, c.sign};

    const MicroGraph& g = c.graph;
    std::vector<std::vector<int>> best = g.targets;
    int best_sign = 1;

    std::vector<int> species(g.species_count() + 1);
    std::iota(species.begin(), species.end(), 0);
    auto species_begin = species.begin() + 1;

    do {
        std::vector<int> sigma(g.n);
        std::iota(sigma.begin(), sigma.end(), 0);
        do {
            auto cand = detail::relabelled_sorted(g, sigma, species);
            if (cand && cand->first < best) {
                best = cand->first;
                best_sign = cand->second;
            }
        } while (std::next_permutation(sigma.begin(), sigma.end()));
        if (mode != CountMode::Iso) break;
    } while (std::next_permutation(species_begin, species.end()));

    MicroGraph rep = g;
    rep.targets = best;
    // input = c.sign * g, g = best_sign * rep under the relabelling
    return {rep, c.sign * best_sign};
}

// ---------------------------------------------------------------------
// GraphSum: integer/rational weighted combination of graphs of one kind
// and one (d, m, n) signature.
// ---------------------------------------------------------------------

template <class G>
struct GraphSum {
    struct Term {
        Rat coeff;
        G graph;
    };
    std::vector<Term> terms;

    bool empty() const { return terms.empty(); }
    std::size_t size() const { return terms.size(); }
};

inline void check_same_signature(const GraphSum<MicroGraph>& gs) {
    for (std::size_t i = 1; i < gs.terms.size(); ++i) {
        const auto& a = gs.terms[0].graph;
        const auto& b = gs.terms[i].graph;
        if (a.d != b.d || a.m != b.m || a.n != b.n)
            throw ValidationError("graph sum mixes (d,m,n) signatures");
    }
}

inline void check_same_signature(const GraphSum<KontsevichGraph>& gs) {
    for (std::size_t i = 1; i < gs.terms.size(); ++i) {
        const auto& a = gs.terms[0].graph;
        const auto& b = gs.terms[i].graph;
        if (a.m != b.m || a.n != b.n)
            throw ValidationError("graph sum mixes (m,n) signatures");
    }
}

// Canonical form of a micro-graph sum under a counting identity: zero
// coefficients and repeated-target graphs dropped, duplicates merged.
inline GraphSum<MicroGraph> normalize_sum(const GraphSum<MicroGraph>& gs,
                                          CountMode mode = CountMode::Raw) {
    check_same_signature(gs);
    std::vector<std::pair<std::vector<std::vector<int>>, std::pair<Rat, MicroGraph>>> acc;
    auto find = [&](const std::vector<std::vector<int>>& key)
        -> std::pair<Rat, MicroGraph>* {
        for (auto& kv : acc)
            if (kv.first == key) return &kv.second;
        return nullptr;
    };
    for (const auto& term : gs.terms) {
        CanonicalMicro c = canonicalize(term.graph);
        if (c.zero) continue;
        Representative rep = representative(c.graph, mode);
        Rat w = term.coeff * Rat(c.sign * rep.sign);
        if (auto* slot = find(rep.graph.targets))
            slot->first += w;
        else
            acc.push_back({rep.graph.targets, {w, rep.graph}});
    }
    std::sort(acc.begin(), acc.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    GraphSum<MicroGraph> out;
    for (auto& kv : acc)
        if (!kv.second.first.is_zero())
            out.terms.push_back({kv.second.first, kv.second.second});
    return out;
}

// ---------------------------------------------------------------------
// GraphSum text form: coeff "*" graph ("+" coeff "*" graph)*
// ---------------------------------------------------------------------

namespace detail {

inline std::vector<std::pair<Rat, std::string>> split_sum_text(const std::string& text) {
    std::vector<std::pair<Rat, std::string>> parts;
    std::size_t i = 0;
    auto skip_ws = [&] {
        while (i < text.size() && std::isspace((unsigned char)text[i])) ++i;
    };
    skip_ws();
    while (i < text.size()) {
        std::size_t star = text.find('*', i);
        if (star == std::string::npos)
            throw ValidationError("graph sum term missing '*' in '" + text + "'");
        std::string coeff_text = text.substr(i, star - i);
        coeff_text.erase(std::remove_if(coeff_text.begin(), coeff_text.end(),
                                        [](unsigned char c) { return std::isspace(c); }),
                         coeff_text.end());
        Rat coeff = Rat::parse(coeff_text);
        std::size_t close = text.find(')', star);
        if (close == std::string::npos)
            throw ValidationError("unterminated graph encoding in '" + text + "'");
        std::size_t open = text.find('(', star);
        parts.push_back({coeff, text.substr(open, close - open + 1)});
        i = close + 1;
        skip_ws();
        if (i < text.size()) {
            if (text[i] != '+')
                throw ValidationError("expected '+' between graph sum terms");
            ++i;
            skip_ws();
        }
    }
    if (parts.empty()) throw ValidationError("empty graph sum");
    return parts;
}

} // namespace detail

inline GraphSum<MicroGraph> parse_micro_sum(const std::string& text, int d, int m,
                                            int n, bool one_based = false) {
    GraphSum<MicroGraph> gs;
    for (auto& [coeff, enc] : detail::split_sum_text(text))
        gs.terms.push_back({coeff, parse_micro(enc, d, m, n, one_based)});
    return gs;
}

inline GraphSum<KontsevichGraph> parse_kontsevich_sum(const std::string& text, int m,
                                                      int n, bool one_based = false) {
    GraphSum<KontsevichGraph> gs;
    for (auto& [coeff, enc] : detail::split_sum_text(text))
        gs.terms.push_back({coeff, parse_kontsevich(enc, m, n, one_based)});
    return gs;
}

template <class G>
std::string serialize_sum(const GraphSum<G>& gs) {
    std::string s;
    for (std::size_t i = 0; i < gs.terms.size(); ++i) {
        if (i) s += " + ";
        s += gs.terms[i].coeff.str();
        s += '*';
        s += serialize_encoding(gs.terms[i].graph);
    }
    return s;
}

} // namespace nambu

#endif
