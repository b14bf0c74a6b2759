#ifndef KERNELCF_DETAIL_RNG_HPP
#define KERNELCF_DETAIL_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

namespace kernelcf::detail {

// Deterministic helpers built directly on the mt19937_64 stream so results
// do not depend on standard-library distribution internals.

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

inline std::size_t bounded(std::mt19937_64& rng, std::size_t n) {
    return static_cast<std::size_t>(rng() % n);
}

template <class T>
void shuffle(std::vector<T>& values, std::mt19937_64& rng) {
    for (std::size_t i = values.size(); i > 1; --i) {
        std::swap(values[i - 1], values[bounded(rng, i)]);
    }
}

}  // namespace kernelcf::detail

#endif
