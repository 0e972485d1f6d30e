#include "buildtime/rng.hpp"

#include <cmath>
#include <numeric>

#include "buildtime/error.hpp"

namespace buildtime {

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

} // namespace

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path)
{
    std::uint64_t state = splitmix64(master);
    for (std::uint64_t step : path) {
        state = splitmix64(state ^ splitmix64(step + 0x632BE59BD9B4E019ULL));
    }
    return state;
}

std::size_t Rng::uniform_index(std::size_t n)
{
    if (n == 0) {
        throw InvalidArgument("uniform_index needs a non-empty range");
    }
    // Rejection sampling on the 64-bit output; threshold = 2^64 mod n.
    const std::uint64_t bound = n;
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        std::uint64_t r = engine_();
        if (r >= threshold) {
            return static_cast<std::size_t>(r % bound);
        }
    }
}

double Rng::uniform()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal()
{
    double u1 = uniform();
    while (u1 <= 0.0) {
        u1 = uniform();
    }
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

std::vector<std::size_t> permutation(std::size_t n, std::uint64_t seed)
{
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(order);
    return order;
}

} // namespace buildtime
