#pragma once

#include <cstdint>
#include <vector>

#include "igeo/measure.hpp"

namespace igeo {

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}
} // namespace detail

// Counter-based generator: a (seed, stream) pair yields a value stream
// that does not depend on what other streams were drawn before it, so
// sweep records stay deterministic under any execution order.
struct counter_rng {
    std::uint64_t key;
    std::uint64_t ctr = 0;

    explicit counter_rng(std::uint64_t seed, std::uint64_t stream = 0)
        : key(detail::mix64(seed ^ detail::mix64(stream * 0xd1342543de82ef95ull + 1))) {}

    std::uint64_t next_u64() { return detail::mix64(key + 0x9e3779b97f4a7c15ull * ++ctr); }

    // uniform in [0, 1)
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    std::size_t next_index(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }
};

// Random interior point of the simplex (Dirichlet(1) with a weight
// floor keeping all atoms comfortably inside the support).
inline probability_measure random_interior_measure(counter_rng& rng, const space_ptr& space,
                                                   double floor = 0.02) {
    const std::size_t n = space->size();
    std::vector<double> w(n);
    double sum = 0.0;
    for (auto& x : w) {
        x = -std::log(1.0 - rng.next_double());
        sum += x;
    }
    double total = 0.0;
    for (auto& x : w) {
        x = floor + (1.0 - n * floor) * (x / sum);
        total += x;
    }
    for (auto& x : w) x /= total;
    return probability_measure(space, std::move(w));
}

// Random direction with total mass zero (a velocity candidate).
inline signed_measure random_zero_sum_direction(counter_rng& rng, const space_ptr& space) {
    const std::size_t n = space->size();
    std::vector<double> v(n);
    double mean = 0.0;
    for (auto& x : v) {
        x = rng.uniform(-1.0, 1.0);
        mean += x;
    }
    mean /= static_cast<double>(n);
    for (auto& x : v) x -= mean;
    return signed_measure(space, std::move(v));
}

} // namespace igeo
