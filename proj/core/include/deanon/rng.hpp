#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace deanon {

/// splitmix64 mixing step. Used to derive independent seed streams from a
/// master seed, e.g. one stream per tree or per ego.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for the `stream`-th substream of `master`. Distinct streams are
/// decorrelated by two mixing rounds.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

/// Deterministic random source. Wraps std::mt19937_64 (the engine output is
/// fully specified by the standard) and provides bounded sampling without
/// std::uniform_int_distribution, whose mapping is implementation-defined.
/// This keeps seeded runs bit-identical across compilers and platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound) {
        // Rejection sampling on the top multiple of bound: unbiased.
        const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % bound;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % bound;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool coin(double p) { return unit() < p; }

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::swap(items[i - 1], items[below(i)]);
        }
    }

    /// First k positions of a Fisher-Yates pass over 0..population-1.
    /// The returned order is the draw order, which callers may rely on for
    /// deterministic tie-breaking.
    std::vector<std::size_t> sample_without_replacement(std::size_t population, std::size_t k) {
        std::vector<std::size_t> idx(population);
        for (std::size_t i = 0; i < population; ++i) idx[i] = i;
        if (k > population) k = population;
        for (std::size_t i = 0; i < k; ++i) {
            std::size_t j = i + static_cast<std::size_t>(below(population - i));
            std::swap(idx[i], idx[j]);
        }
        idx.resize(k);
        return idx;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace deanon
