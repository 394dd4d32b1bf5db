#ifndef NAMBU_POLYALG_HPP
#define NAMBU_POLYALG_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nambu/graphs.hpp"
#include "nambu/parallel.hpp"
#include "nambu/perm.hpp"
#include "nambu/rational.hpp"

namespace nambu {

// =====================================================================
// Jet monomials.
//
// A monomial of the evaluated formula is, per graph signature (d, m, n):
//   - one derivative multi-index per sink argument slot (ordered, the
//     arguments are distinct),
//   - a multiset of n derivative multi-indices on the rho factors (all n
//     factors are jets of the same function),
//   - per Casimir species k = 1..d-2, a multiset of n nonempty
//     multi-indices (again jets of one function a^k).
// Multi-indices are sorted multisets over 1..d (partial derivatives
// commute). The encoded key is a flat byte string: sink blocks in order,
// then the rho blocks sorted lexicographically, then each species group
// with its blocks sorted; every block is length-prefixed. Byte-wise
// lexicographic order on keys is the documented total order on terms.
// =====================================================================

using JetKey = std::vector<std::uint8_t>;

struct JetMonomial {
    std::vector<std::vector<int>> sinks;                 // m blocks
    std::vector<std::vector<int>> rho;                   // n blocks, sorted lex
    std::vector<std::vector<std::vector<int>>> casimirs; // species 1..d-2, n blocks each
};

inline JetKey encode_monomial(const JetMonomial& mono) {
    JetKey key;
    auto put_block = [&key](const std::vector<int>& block) {
        key.push_back((std::uint8_t)block.size());
        for (int idx : block) key.push_back((std::uint8_t)idx);
    };
    for (const auto& b : mono.sinks) put_block(b);
    for (const auto& b : mono.rho) put_block(b);
    for (const auto& group : mono.casimirs)
        for (const auto& b : group) put_block(b);
    return key;
}

inline JetMonomial decode_monomial(const JetKey& key, int d, int m, int n) {
    JetMonomial mono;
    std::size_t pos = 0;
    auto get_block = [&]() {
        std::vector<int> block(key[pos]);
        ++pos;
        for (auto& idx : block) idx = key[pos++];
        return block;
    };
    for (int s = 0; s < m; ++s) mono.sinks.push_back(get_block());
    for (int t = 0; t < n; ++t) mono.rho.push_back(get_block());
    for (int k = 1; k <= d - 2; ++k) {
        std::vector<std::vector<int>> group;
        for (int t = 0; t < n; ++t) group.push_back(get_block());
        mono.casimirs.push_back(std::move(group));
    }
    if (pos != key.size())
        throw std::logic_error("decode_monomial: trailing bytes");
    return mono;
}

// =====================================================================
// DiffPolynomial: canonical map monomial -> exact coefficient.
// =====================================================================

struct DiffPolynomial {
    int d = 0, m = 0, n = 0;
    std::map<JetKey, Rat> coeffs;

    bool is_zero() const { return coeffs.empty(); }
    std::size_t term_count() const { return coeffs.size(); }

    void add_term(const JetKey& key, const Rat& c) {
        if (c.is_zero()) return;
        auto [it, fresh] = coeffs.try_emplace(key, c);
        if (!fresh) {
            it->second += c;
            if (it->second.is_zero()) coeffs.erase(it);
        }
    }

    DiffPolynomial& operator+=(const DiffPolynomial& o) {
        if (d != o.d || m != o.m || n != o.n)
            throw ValidationError("polynomial signature mismatch");
        for (const auto& [k, c] : o.coeffs) add_term(k, c);
        return *this;
    }

    DiffPolynomial& scale(const Rat& s) {
        if (s.is_zero()) {
            coeffs.clear();
            return *this;
        }
        for (auto& [k, c] : coeffs) c *= s;
        return *this;
    }

    friend bool operator==(const DiffPolynomial& a, const DiffPolynomial& b) {
        return a.d == b.d && a.m == b.m && a.n == b.n && a.coeffs == b.coeffs;
    }
};

// =====================================================================
// Expansion plan: one factor bucket per jet factor. Factor ids:
//   [0, m)                     sink slots
//   [m, m+n)                   rho factors by Levi-Civita index
//   [m+n, m+n+(d-2)n)          Casimir factors, species-major
// =====================================================================

namespace detail {

struct EvalPlan {
    const MicroGraph* g = nullptr;
    int factor_count = 0;
    std::vector<int> edge_factor; // (t*d + s) -> factor id
};

inline EvalPlan make_plan(const MicroGraph& g) {
    EvalPlan plan;
    plan.g = &g;
    plan.factor_count = g.m + g.n + (g.d - 2) * g.n;
    plan.edge_factor.resize((std::size_t)g.n * g.d);
    for (int t = 0; t < g.n; ++t)
        for (int s = 0; s < g.d; ++s) {
            int w = g.targets[t][s];
            int f;
            if (g.is_sink(w))
                f = w;
            else if (g.is_lc(w))
                f = g.m + (w - g.m);
            else
                f = g.m + g.n + (g.casimir_species(w) - 1) * g.n +
                    g.casimir_parent_index(w);
            plan.edge_factor[(std::size_t)t * g.d + s] = f;
        }
    return plan;
}

constexpr int kMaxFactorDegree = 32;

struct Buckets {
    // data[f][0..cnt[f]) holds the derivative indices landing on factor f.
    std::vector<std::array<std::uint8_t, kMaxFactorDegree>> data;
    std::vector<std::uint8_t> cnt;

    explicit Buckets(int factors) : data(factors), cnt(factors, 0) {}
    void reset() { std::fill(cnt.begin(), cnt.end(), 0); }
    void push(int f, std::uint8_t idx) {
        if (cnt[f] >= kMaxFactorDegree)
            throw std::overflow_error("factor in-degree exceeds bucket capacity");
        data[f][cnt[f]++] = idx;
    }
};

inline void sort_small(std::uint8_t* xs, int len) {
    for (int i = 1; i < len; ++i) {
        std::uint8_t v = xs[i];
        int j = i - 1;
        while (j >= 0 && xs[j] > v) {
            xs[j + 1] = xs[j];
            --j;
        }
        xs[j + 1] = v;
    }
}

// Serializes the bucket contents for one assignment into `key`. Buckets
// are sorted in place; group-internal block order is normalized.
inline void build_key(const MicroGraph& g, Buckets& b, JetKey& key) {
    key.clear();
    for (int f = 0; f < (int)b.data.size(); ++f)
        sort_small(b.data[f].data(), b.cnt[f]);

    auto append_block = [&](int f) {
        key.push_back(b.cnt[f]);
        key.insert(key.end(), b.data[f].data(), b.data[f].data() + b.cnt[f]);
    };
    auto block_less = [&](int fa, int fb) {
        int la = b.cnt[fa], lb = b.cnt[fb];
        int l = std::min(la, lb);
        for (int i = 0; i < l; ++i) {
            if (b.data[fa][i] != b.data[fb][i]) return b.data[fa][i] < b.data[fb][i];
        }
        return la < lb;
    };

    for (int s = 0; s < g.m; ++s) append_block(s);

    int order[16];
    for (int grp = 0; grp <= g.d - 2; ++grp) {
        int base = g.m + grp * g.n; // grp 0 = rho group, grp k = species k
        for (int t = 0; t < g.n; ++t) order[t] = base + t;
        std::sort(order, order + g.n, block_less);
        for (int t = 0; t < g.n; ++t) append_block(order[t]);
    }
}

// Core expansion: iterates assignments of one d-permutation per
// Levi-Civita vertex over a flat index range [lo, hi) of the free
// vertices' mixed-radix odometer; vertex `fixed_vertex` (if >= 0) keeps
// permutation `fixed_perm` throughout.
inline void expand_range(const EvalPlan& plan, const PermTable& pt, std::size_t lo,
                         std::size_t hi, int fixed_vertex, std::size_t fixed_perm,
                         std::map<JetKey, std::int64_t>& out) {
    const MicroGraph& g = *plan.g;
    const std::size_t P = pt.count;
    std::vector<int> free_vertices;
    for (int t = 0; t < g.n; ++t)
        if (t != fixed_vertex) free_vertices.push_back(t);

    std::vector<std::size_t> pidx(g.n, 0);
    if (fixed_vertex >= 0) pidx[fixed_vertex] = fixed_perm;
    {
        std::size_t rest = lo;
        for (int i = (int)free_vertices.size() - 1; i >= 0; --i) {
            pidx[free_vertices[i]] = rest % P;
            rest /= P;
        }
    }

    Buckets buckets(plan.factor_count);
    JetKey key;
    key.reserve(64);

    for (std::size_t a = lo; a < hi; ++a) {
        int sign = 1;
        for (int t = 0; t < g.n; ++t) sign *= pt.parity[pidx[t]];

        buckets.reset();
        for (int t = 0; t < g.n; ++t) {
            const std::uint8_t* perm = pt.perm(pidx[t]);
            for (int s = 0; s < g.d; ++s)
                buckets.push(plan.edge_factor[(std::size_t)t * g.d + s], perm[s]);
        }
        build_key(g, buckets, key);

        auto it = out.find(key);
        if (it != out.end()) {
            it->second += sign;
            if (it->second == 0) out.erase(it);
        } else {
            out.emplace(key, sign);
        }

        // odometer over the free vertices, last one fastest
        for (int i = (int)free_vertices.size() - 1; i >= 0; --i) {
            int t = free_vertices[i];
            if (++pidx[t] < P) break;
            pidx[t] = 0;
        }
    }
}

inline std::size_t ipow(std::size_t b, int e) {
    std::size_t r = 1;
    while (e-- > 0) r *= b;
    return r;
}

} // namespace detail

// ---------------------------------------------------------------------
// evaluate: expand over one permutation of {1..d} per Levi-Civita vertex
// ((d!)^n signed terms), distribute every edge index as a derivative on
// the content of its head vertex (a tadpole differentiates the issuing
// vertex's own rho), and merge into the canonical coefficient map.
// ---------------------------------------------------------------------

inline DiffPolynomial evaluate(const MicroGraph& g, int threads = 1) {
    validate_structure(g);
    auto wf = is_wellformed_nambu(g);
    if (!wf.ok) throw ValidationError("evaluate: " + wf.diagnostics.front());

    DiffPolynomial poly;
    poly.d = g.d;
    poly.m = g.m;
    poly.n = g.n;

    detail::EvalPlan plan = detail::make_plan(g);
    PermTable pt = make_perm_table(g.d);
    std::size_t total = detail::ipow(pt.count, g.n);

    if (threads <= 1) {
        std::map<JetKey, std::int64_t> acc;
        detail::expand_range(plan, pt, 0, total, -1, 0, acc);
        for (auto& [k, c] : acc)
            if (c != 0) poly.coeffs.emplace(k, Rat(c));
        return poly;
    }

    std::vector<std::map<JetKey, std::int64_t>> partial(threads);
    parallel_chunks(total, threads, [&](int chunk, std::size_t lo, std::size_t hi) {
        detail::expand_range(plan, pt, lo, hi, -1, 0, partial[chunk]);
    });
    std::map<JetKey, std::int64_t> acc;
    for (auto& part : partial)
        for (auto& [k, c] : part) {
            auto [it, fresh] = acc.try_emplace(k, c);
            if (!fresh) it->second += c;
        }
    for (auto& [k, c] : acc)
        if (c != 0) poly.coeffs.emplace(k, Rat(c));
    return poly;
}

inline DiffPolynomial evaluate_sum(const GraphSum<MicroGraph>& gs, int threads = 1) {
    if (gs.terms.empty()) throw ValidationError("evaluate_sum: empty graph sum");
    check_same_signature(gs);
    DiffPolynomial total;
    const auto& g0 = gs.terms[0].graph;
    total.d = g0.d;
    total.m = g0.m;
    total.n = g0.n;
    for (const auto& term : gs.terms) {
        DiffPolynomial part = evaluate(term.graph, threads);
        part.scale(term.coeff);
        total += part;
    }
    return total;
}

inline bool is_vanishing(const MicroGraph& g, int threads = 1) {
    return evaluate(g, threads).is_zero();
}

inline bool is_vanishing(const GraphSum<MicroGraph>& gs, int threads = 1) {
    return evaluate_sum(gs, threads).is_zero();
}

// ---------------------------------------------------------------------
// Head/cross decomposition of an embedded graph's formula. The head is
// the sub-polynomial in which every factor of the newest Casimir species
// is exactly the first derivative in the new direction d+1; it factors as
// the original formula times (a^{d-1}_{x^{d+1}})^n. Everything else is
// cross. head + cross = evaluate(embedded) by construction.
// ---------------------------------------------------------------------

struct EmbeddingSplit {
    DiffPolynomial head;
    DiffPolynomial cross;
};

namespace detail {

inline bool is_embedding_of(const MicroGraph& original, const MicroGraph& embedded) {
    if (embedded.d != original.d + 1 || embedded.m != original.m ||
        embedded.n != original.n)
        return false;
    for (int t = 0; t < original.n; ++t) {
        const auto& src = original.targets[t];
        const auto& dst = embedded.targets[t];
        if (!std::equal(src.begin(), src.end(), dst.begin())) return false;
        int new_casimir = embedded.own_casimir(embedded.lc_label(t), embedded.d - 2);
        if (dst.back() != new_casimir) return false;
    }
    return true;
}

} // namespace detail

inline EmbeddingSplit embedding_split(const MicroGraph& original,
                                      const MicroGraph& embedded, int threads = 1) {
    if (!detail::is_embedding_of(original, embedded))
        throw ValidationError("embedding_split: second graph is not the embedding of the first");
    DiffPolynomial whole = evaluate(embedded, threads);
    EmbeddingSplit split;
    split.head.d = split.cross.d = whole.d;
    split.head.m = split.cross.m = whole.m;
    split.head.n = split.cross.n = whole.n;

    const int D = embedded.d;
    for (const auto& [key, coeff] : whole.coeffs) {
        JetMonomial mono = decode_monomial(key, D, whole.m, whole.n);
        const auto& newest = mono.casimirs.back(); // species D-2
        bool head = true;
        for (const auto& block : newest)
            if (block.size() != 1 || block[0] != D) {
                head = false;
                break;
            }
        (head ? split.head : split.cross).coeffs.emplace(key, coeff);
    }
    return split;
}

// Strips the newest-species factors off a head polynomial, producing the
// formula over dimension d-1 that it factors through. Only meaningful on
// polynomials whose newest-species blocks are all [d].
inline DiffPolynomial strip_head(const DiffPolynomial& head) {
    DiffPolynomial out;
    out.d = head.d - 1;
    out.m = head.m;
    out.n = head.n;
    for (const auto& [key, coeff] : head.coeffs) {
        JetMonomial mono = decode_monomial(key, head.d, head.m, head.n);
        for (const auto& block : mono.casimirs.back())
            if (block.size() != 1 || block[0] != head.d)
                throw ValidationError("strip_head: not a pure head monomial");
        mono.casimirs.pop_back();
        out.coeffs.emplace(encode_monomial(mono), coeff);
    }
    return out;
}

// ---------------------------------------------------------------------
// Expanded signed terms and cancellation-pairing certificates.
// ---------------------------------------------------------------------

struct ExpandedTerm {
    std::vector<std::uint32_t> perm_index; // one lexicographic d-perm index per vertex
    int sign = 1;
    JetKey key;
};

inline std::vector<ExpandedTerm> expanded_terms(const MicroGraph& g) {
    validate_structure(g);
    auto wf = is_wellformed_nambu(g);
    if (!wf.ok) throw ValidationError("expanded_terms: " + wf.diagnostics.front());

    detail::EvalPlan plan = detail::make_plan(g);
    PermTable pt = make_perm_table(g.d);
    std::size_t total = detail::ipow(pt.count, g.n);

    std::vector<ExpandedTerm> terms;
    terms.reserve(total);
    detail::Buckets buckets(plan.factor_count);
    std::vector<std::size_t> pidx(g.n, 0);
    for (std::size_t a = 0; a < total; ++a) {
        ExpandedTerm term;
        term.perm_index.assign(pidx.begin(), pidx.end());
        term.sign = 1;
        for (int t = 0; t < g.n; ++t) term.sign *= pt.parity[pidx[t]];
        buckets.reset();
        for (int t = 0; t < g.n; ++t) {
            const std::uint8_t* perm = pt.perm(pidx[t]);
            for (int s = 0; s < g.d; ++s)
                buckets.push(plan.edge_factor[(std::size_t)t * g.d + s], perm[s]);
        }
        detail::build_key(g, buckets, term.key);
        terms.push_back(std::move(term));
        for (int t = g.n - 1; t >= 0; --t) {
            if (++pidx[t] < pt.count) break;
            pidx[t] = 0;
        }
    }
    return terms;
}

struct PairingCertificate {
    bool valid = false;
    std::string method;                      // "automorphism" or "greedy"
    std::vector<std::pair<std::size_t, std::size_t>> pairs; // indices into terms
    std::vector<std::size_t> residue;        // unpaired term indices
    std::vector<ExpandedTerm> terms;
    std::vector<int> marked_casimirs;        // labels moved by some g != 1
};

namespace detail {

// Action of a signed automorphism on an assignment: edge (t, s) moves to
// (sigma(t), tau_t(s)) keeping its index, where tau_t re-sorts the
// relabelled tuple of t into the tuple at sigma(t).
struct AutAction {
    std::vector<int> sigma;
    std::vector<std::vector<int>> tau; // per source vertex: slot map
};

inline std::optional<AutAction> automorphism_action(const MicroGraph& g,
                                                    const SignedAutomorphism& aut) {
    AutAction act;
    act.sigma = aut.lc_permutation;
    act.tau.resize(g.n);
    auto species_id = detail::identity_species_map(g);
    for (int t = 0; t < g.n; ++t) {
        std::vector<std::pair<int, int>> relabelled; // (new label, source slot)
        for (int s = 0; s < g.d; ++s) {
            int v = g.targets[t][s];
            int w;
            if (g.is_sink(v))
                w = v;
            else if (g.is_lc(v))
                w = g.m + act.sigma[v - g.m];
            else
                w = g.m + species_id[g.casimir_species(v)] * g.n +
                    act.sigma[g.casimir_parent_index(v)];
            relabelled.push_back({w, s});
        }
        std::sort(relabelled.begin(), relabelled.end());
        const auto& dest = g.targets[act.sigma[t]];
        act.tau[t].assign(g.d, -1);
        for (int pos = 0; pos < g.d; ++pos) {
            if (relabelled[pos].first != dest[pos]) return std::nullopt;
            act.tau[t][relabelled[pos].second] = pos;
        }
    }
    return act;
}

inline std::vector<std::uint32_t> apply_action(const MicroGraph& g, const PermTable& pt,
                                               const std::map<std::vector<std::uint8_t>, std::uint32_t>& perm_lookup,
                                               const AutAction& act,
                                               const std::vector<std::uint32_t>& pidx) {
    std::vector<std::uint32_t> out(g.n);
    std::vector<std::uint8_t> moved(g.d);
    for (int t = 0; t < g.n; ++t) {
        const std::uint8_t* perm = pt.perm(pidx[t]);
        for (int s = 0; s < g.d; ++s) moved[act.tau[t][s]] = perm[s];
        out[act.sigma[t]] = perm_lookup.at(moved);
    }
    return out;
}

} // namespace detail

// Matches the (d!)^n expanded signed terms of a vanishing graph into
// disjoint opposite-sign pairs with equal monomials. When a sign-reversing
// automorphism exists, the pairing it induces is used; otherwise terms are
// zipped greedily per monomial class in deterministic order.
inline PairingCertificate pairing_certificate(const MicroGraph& graph) {
    CanonicalMicro c = canonicalize(graph);
    if (c.zero)
        throw ValidationError("pairing_certificate: repeated-target tuple (trivially zero)");
    const MicroGraph& g = c.graph;
    if (!is_vanishing(g))
        throw ValidationError("pairing_certificate: graph does not vanish");

    PairingCertificate cert;
    cert.terms = expanded_terms(g);

    auto auts = automorphisms(g);
    for (const auto& a : auts) {
        bool moves = false;
        for (std::size_t t = 0; t < a.lc_permutation.size(); ++t)
            if (a.lc_permutation[t] != (int)t) moves = true;
        if (!moves) continue;
        for (int k = 1; k <= g.species_count(); ++k)
            for (int t = 0; t < g.n; ++t)
                if (a.lc_permutation[t] != t)
                    cert.marked_casimirs.push_back(g.own_casimir(g.lc_label(t), k));
    }
    std::sort(cert.marked_casimirs.begin(), cert.marked_casimirs.end());
    cert.marked_casimirs.erase(
        std::unique(cert.marked_casimirs.begin(), cert.marked_casimirs.end()),
        cert.marked_casimirs.end());

    const SignedAutomorphism* reversing = nullptr;
    for (const auto& a : auts)
        if (a.sign < 0) {
            reversing = &a;
            break;
        }

    if (reversing) {
        auto act = detail::automorphism_action(g, *reversing);
        if (act) {
            PermTable pt = make_perm_table(g.d);
            std::map<std::vector<std::uint8_t>, std::uint32_t> perm_lookup;
            for (std::size_t p = 0; p < pt.count; ++p)
                perm_lookup.emplace(
                    std::vector<std::uint8_t>(pt.perm(p), pt.perm(p) + g.d),
                    (std::uint32_t)p);
            std::map<std::vector<std::uint32_t>, std::size_t> term_by_assignment;
            for (std::size_t i = 0; i < cert.terms.size(); ++i)
                term_by_assignment.emplace(
                    std::vector<std::uint32_t>(cert.terms[i].perm_index.begin(),
                                               cert.terms[i].perm_index.end()),
                    i);
            std::vector<bool> used(cert.terms.size(), false);
            bool ok = true;
            for (std::size_t i = 0; i < cert.terms.size() && ok; ++i) {
                if (used[i]) continue;
                auto partner_assignment = detail::apply_action(
                    g, pt, perm_lookup, *act, cert.terms[i].perm_index);
                std::size_t j = term_by_assignment.at(partner_assignment);
                if (j == i || used[j] || cert.terms[j].sign == cert.terms[i].sign ||
                    cert.terms[j].key != cert.terms[i].key) {
                    ok = false;
                    break;
                }
                used[i] = used[j] = true;
                cert.pairs.push_back({i, j});
            }
            if (ok) {
                cert.valid = true;
                cert.method = "automorphism";
                return cert;
            }
            cert.pairs.clear();
        }
    }

    // Greedy: per monomial class, zip plus and minus terms in index order.
    std::map<JetKey, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> classes;
    for (std::size_t i = 0; i < cert.terms.size(); ++i) {
        auto& cls = classes[cert.terms[i].key];
        (cert.terms[i].sign > 0 ? cls.first : cls.second).push_back(i);
    }
    for (auto& [key, cls] : classes) {
        std::size_t paired = std::min(cls.first.size(), cls.second.size());
        for (std::size_t i = 0; i < paired; ++i)
            cert.pairs.push_back({cls.first[i], cls.second[i]});
        for (std::size_t i = paired; i < cls.first.size(); ++i)
            cert.residue.push_back(cls.first[i]);
        for (std::size_t i = paired; i < cls.second.size(); ++i)
            cert.residue.push_back(cls.second[i]);
    }
    std::sort(cert.residue.begin(), cert.residue.end());
    cert.valid = cert.residue.empty();
    cert.method = "greedy";
    return cert;
}

// ---------------------------------------------------------------------
// Blockwise vanishing: true iff for every fixed permutation at the chosen
// Levi-Civita vertex, the partial sum over all other vertices' assignments
// is already the zero polynomial.
// ---------------------------------------------------------------------

inline bool blockwise_vanishing(const MicroGraph& graph, int lc_index, int threads = 1) {
    validate_structure(graph);
    if (lc_index < 0 || lc_index >= graph.n)
        throw ValidationError("blockwise_vanishing: vertex index out of range");
    auto wf = is_wellformed_nambu(graph);
    if (!wf.ok) throw ValidationError("blockwise_vanishing: " + wf.diagnostics.front());

    detail::EvalPlan plan = detail::make_plan(graph);
    PermTable pt = make_perm_table(graph.d);
    std::size_t rest = detail::ipow(pt.count, graph.n - 1);

    std::vector<char> block_zero(pt.count, 0);
    parallel_for_each(pt.count, threads, [&](std::size_t p) {
        std::map<JetKey, std::int64_t> acc;
        detail::expand_range(plan, pt, 0, rest, lc_index, p, acc);
        block_zero[p] = acc.empty() ? 1 : 0;
    });
    return std::all_of(block_zero.begin(), block_zero.end(), [](char z) { return z != 0; });
}

} // namespace nambu

#endif
