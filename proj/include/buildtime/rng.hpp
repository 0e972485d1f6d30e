#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace buildtime {

// Derives an independent stream seed from a master seed and a path of
// indices (tree number, fold number, ...). SplitMix64 finalizer per step.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

// Portable random source: mt19937_64 output is fixed by the standard, and
// every distribution below is implemented here so that results do not
// depend on the standard library vendor.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform integer in [0, n), unbiased.
    std::size_t uniform_index(std::size_t n);

    // Uniform real in [0, 1).
    double uniform();

    // Standard normal draw (Box-Muller, one value per call).
    double normal();

    template <typename T>
    void shuffle(std::vector<T>& values)
    {
        for (std::size_t i = values.size(); i > 1; --i) {
            std::size_t j = uniform_index(i);
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

// Seeded permutation of 0..n-1.
std::vector<std::size_t> permutation(std::size_t n, std::uint64_t seed);

} // namespace buildtime
