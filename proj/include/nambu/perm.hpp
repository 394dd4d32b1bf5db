#ifndef NAMBU_PERM_HPP
#define NAMBU_PERM_HPP

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

namespace nambu {

// Parity of an arbitrary integer sequence under sorting: +1 if an even
// number of transpositions sorts it ascending, -1 if odd. Repeats are the
// caller's concern (inversion count still well-defined).
template <class Seq>
int sort_parity(const Seq& xs) {
    int inversions = 0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = i + 1; j < xs.size(); ++j)
            if (xs[i] > xs[j]) ++inversions;
    return (inversions % 2 == 0) ? 1 : -1;
}

template <class Seq>
bool has_repeat(const Seq& xs) {
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = i + 1; j < xs.size(); ++j)
            if (xs[i] == xs[j]) return true;
    return false;
}

struct PermTable {
    // perms[p] is the p-th permutation of {1,...,d} in lexicographic
    // order, flattened; parity[p] its sign.
    int d = 0;
    std::vector<std::uint8_t> perms; // size d! * d
    std::vector<std::int8_t> parity; // size d!
    std::size_t count = 0;

    const std::uint8_t* perm(std::size_t p) const { return perms.data() + p * d; }
};

inline PermTable make_perm_table(int d) {
    PermTable t;
    t.d = d;
    std::vector<std::uint8_t> cur(d);
    std::iota(cur.begin(), cur.end(), 1);
    do {
        t.perms.insert(t.perms.end(), cur.begin(), cur.end());
        t.parity.push_back((std::int8_t)sort_parity(cur));
        ++t.count;
    } while (std::next_permutation(cur.begin(), cur.end()));
    return t;
}

inline std::size_t factorial(int d) {
    std::size_t f = 1;
    for (int i = 2; i <= d; ++i) f *= (std::size_t)i;
    return f;
}

// Composition acting on positions: (a*b)[i] = a[b[i]].
inline std::vector<int> compose(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> c(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) c[i] = a[b[i]];
    return c;
}

inline std::vector<int> inverse(const std::vector<int>& p) {
    std::vector<int> inv(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) inv[p[i]] = (int)i;
    return inv;
}

} // namespace nambu

#endif
