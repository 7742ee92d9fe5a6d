#include "betheperm/rng.hpp"

#include <bit>

#include "betheperm/errors.hpp"

namespace betheperm {

namespace {

// splitmix64 finalizer; decorrelates child seeds from sequential indices.
std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

RngSpec RngSpec::child(std::uint64_t index) const {
    return {mix64(seed ^ mix64(index + 1)), algorithm};
}

std::mt19937_64 make_engine(const RngSpec& spec) {
    if (spec.algorithm != "mt19937-64")
        throw domain_error("unknown rng algorithm: " + spec.algorithm);
    return std::mt19937_64{spec.seed};
}

std::uint64_t uniform_index(std::mt19937_64& eng, std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t mask = ~0ULL >> std::countl_zero(bound - 1);
    std::uint64_t v;
    do {
        v = eng() & mask;
    } while (v >= bound);
    return v;
}

}  // namespace betheperm
