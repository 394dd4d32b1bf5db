#ifndef NAMBU_CATALOGUE_HPP
#define NAMBU_CATALOGUE_HPP

#include <optional>
#include <string>
#include <vector>

#include "nambu/graphs.hpp"

namespace nambu {
namespace catalogue {

// The built-in graphs are the encodings the reference census states
// verbatim; everything else in the experiments is regenerated from them.

// 1-vector seed: (0,1;1,3;1,2) + 2*(0,2;1,3;1,2) on one sink and three
// wedges. Dimension-agnostic.
inline GraphSum<KontsevichGraph> sunflower() {
    return parse_kontsevich_sum("1*(0,1;1,3;1,2) + 2*(0,2;1,3;1,2)", 1, 3);
}

// Single wedge on two sinks: expands to the bare bracket in any d.
inline KontsevichGraph wedge() { return parse_kontsevich("(0,1)", 2, 1); }

// Bare d-dimensional bracket as a micro-graph: two sinks, one
// Levi-Civita vertex, its own Casimirs.
inline MicroGraph bare_bracket(int d) {
    MicroGraph g;
    g.d = d;
    g.m = 2;
    g.n = 1;
    std::vector<int> tup = {0, 1};
    for (int k = 1; k <= d - 2; ++k) tup.push_back(2 + k);
    g.targets = {tup};
    validate_structure(g);
    return g;
}

// Vanishing 1-vector trident graph No. 10 of the 3D census.
inline MicroGraph g10() { return parse_micro("(0,1,4;1,6,5;4,5,6)", 3, 1, 3); }

// 3D sample used to illustrate the embedding map.
inline MicroGraph embed_sample() { return parse_micro("(0,2,4;1,3,5;1,2,6)", 3, 1, 3); }

// The unique vanishing 4D Hamiltonian on two bracket copies, stated with
// 1-based labels in its source.
inline MicroGraph h9() { return parse_micro("(1,2,3,5;3,4,5,6)", 4, 0, 2, /*one_based=*/true); }

struct Entry {
    std::string id;
    std::string description;
};

inline std::vector<Entry> entries() {
    return {
        {"sunflower", "Kontsevich 1-vector sum, (m,n)=(1,3), with a tadpole wedge"},
        {"wedge", "single Kontsevich wedge on two sinks"},
        {"bracket3", "bare 3D bracket micro-graph (0,1,3), m=2, n=1"},
        {"g10", "vanishing 3D trident micro-graph (0,1,4;1,6,5;4,5,6)"},
        {"embed-sample", "3D micro-graph (0,2,4;1,3,5;1,2,6)"},
        {"h9", "vanishing 4D Hamiltonian micro-graph, m=0, n=2"},
    };
}

inline std::optional<MicroGraph> micro_by_id(const std::string& id) {
    if (id == "bracket3") return bare_bracket(3);
    if (id == "g10") return g10();
    if (id == "embed-sample") return embed_sample();
    if (id == "h9") return h9();
    return std::nullopt;
}

} // namespace catalogue
} // namespace nambu

#endif
