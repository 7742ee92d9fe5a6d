#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace betheperm {

// Seedable RNG description. Identical specs yield identical streams on every
// platform: the mt19937-64 engine is standardized, and doubles are mapped from
// its raw output directly, never through std distributions (whose output is
// implementation-defined).
struct RngSpec {
    std::uint64_t seed = 0;
    std::string algorithm = "mt19937-64";

    // Independent child stream for work item `index` (splitmix64 mixing).
    RngSpec child(std::uint64_t index) const;
};

// Throws domain_error on an unknown algorithm identifier.
std::mt19937_64 make_engine(const RngSpec& spec);

// Uniform double in [0, 1), 53 random bits.
inline double uniform_unit(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, bound) by masked rejection; exact for any bound.
std::uint64_t uniform_index(std::mt19937_64& eng, std::uint64_t bound);

}  // namespace betheperm
