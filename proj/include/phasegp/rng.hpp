#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace phasegp {

using Rng = std::mt19937_64;

// Independent stream keyed by (master seed, keys...). Used to give every
// reproduction slot its own generator so that results do not depend on the
// number of worker threads.
inline Rng make_stream(std::uint64_t master, std::initializer_list<std::uint64_t> keys)
{
    std::vector<std::uint32_t> words;
    words.reserve(2 + 2 * keys.size());
    auto push = [&](std::uint64_t v) {
        words.push_back(static_cast<std::uint32_t>(v));
        words.push_back(static_cast<std::uint32_t>(v >> 32));
    };
    push(master);
    for (auto k : keys) {
        push(k);
    }
    std::seed_seq seq(words.begin(), words.end());
    return Rng(seq);
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline std::size_t uniform_index(Rng& rng, std::size_t n)
{
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace phasegp
