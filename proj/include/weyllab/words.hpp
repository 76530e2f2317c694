#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "errors.hpp"

namespace weyllab {

// Signed generator indices: k > 0 is generator k (1-based), -k its inverse.
using Word = std::vector<int>;

inline void check_word(const Word& w, int generators)
{
    for (int s : w)
        if (s == 0 || s > generators || -s > generators)
            throw DomainError("word letter " + std::to_string(s) + " outside generator range 1.." + std::to_string(generators));
}

inline Word inverse(const Word& w)
{
    Word r(w.rbegin(), w.rend());
    for (int& s : r) s = -s;
    return r;
}

inline Word free_reduce(const Word& w)
{
    Word r;
    r.reserve(w.size());
    for (int s : w) {
        if (!r.empty() && r.back() == -s)
            r.pop_back();
        else
            r.push_back(s);
    }
    return r;
}

inline bool is_reduced(const Word& w)
{
    for (std::size_t i = 1; i < w.size(); ++i)
        if (w[i] == -w[i - 1]) return false;
    return true;
}

// Free reduction, then cancellation across the wrap.
inline Word cyclic_reduce(const Word& w)
{
    Word r = free_reduce(w);
    std::size_t lo = 0, hi = r.size();
    while (hi - lo >= 2 && r[lo] == -r[hi - 1]) {
        ++lo;
        --hi;
    }
    return Word(r.begin() + static_cast<std::ptrdiff_t>(lo), r.begin() + static_cast<std::ptrdiff_t>(hi));
}

inline bool is_cyclically_reduced(const Word& w)
{
    return is_reduced(w) && (w.size() < 2 || w.front() != -w.back());
}

inline Word rotate(const Word& w, std::size_t k)
{
    Word r(w.size());
    if (w.empty()) return r;
    for (std::size_t i = 0; i < w.size(); ++i) r[i] = w[(i + k) % w.size()];
    return r;
}

inline Word min_rotation(const Word& w)
{
    Word best = w;
    for (std::size_t k = 1; k < w.size(); ++k) {
        Word r = rotate(w, k);
        if (r < best) best = std::move(r);
    }
    return best;
}

struct RootPower {
    Word root;
    int power = 1;
};

// Shortest u with w = u^k as strings (prefix-function period).
inline RootPower primitive_root(const Word& w)
{
    const std::size_t L = w.size();
    if (L == 0) return {w, 1};
    std::vector<std::size_t> pi(L, 0);
    for (std::size_t i = 1; i < L; ++i) {
        std::size_t k = pi[i - 1];
        while (k > 0 && w[i] != w[k]) k = pi[k - 1];
        if (w[i] == w[k]) ++k;
        pi[i] = k;
    }
    const std::size_t p = L - pi[L - 1];
    if (p < L && L % p == 0) return {Word(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(p)), static_cast<int>(L / p)};
    return {w, 1};
}

inline bool is_primitive(const Word& w) { return !w.empty() && primitive_root(w).power == 1; }

// In a free group two reduced words are the same element iff they are equal,
// and rotations of a cyclically reduced word are reduced, so comparing the
// rotations as words compares them as group elements.
inline bool cyclic_shifts_distinct(const Word& w)
{
    if (w.empty() || !is_cyclically_reduced(w)) throw DomainError("cyclic_shifts_distinct: word must be nonempty and cyclically reduced");
    if (!is_primitive(w)) throw DomainError("cyclic_shifts_distinct: word is a proper power");
    std::set<Word> seen;
    for (std::size_t k = 0; k < w.size(); ++k) seen.insert(free_reduce(rotate(w, k)));
    return seen.size() == w.size();
}

inline Word random_reduced_word(std::mt19937_64& rng, int generators, std::size_t length)
{
    std::uniform_int_distribution<int> pick(1, 2 * generators);
    Word w;
    while (w.size() < length) {
        const int v = pick(rng);
        const int s = v <= generators ? v : -(v - generators);
        if (!w.empty() && w.back() == -s) continue;
        w.push_back(s);
    }
    return w;
}

// Uniform over cyclically reduced primitive words of the given length (rejection).
inline Word random_primitive_word(std::mt19937_64& rng, int generators, std::size_t length)
{
    for (;;) {
        Word w = random_reduced_word(rng, generators, length);
        if (is_cyclically_reduced(w) && is_primitive(w)) return w;
    }
}

inline std::string word_to_string(const Word& w)
{
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) s += ' ';
        s += std::to_string(w[i]);
    }
    return s;
}

} // namespace weyllab
