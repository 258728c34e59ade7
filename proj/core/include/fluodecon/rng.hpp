#pragma once

#include <cstdint>

namespace fluodecon {

/// SplitMix64 (Vigna), used for seeding and for deriving independent stream
/// seeds. Bijective 64-bit mixer with published constants.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// Deterministic per-stream seed derivation, so channels and batch entries
/// get decorrelated generators from one user seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// xoshiro256++ (Blackman & Vigna) with SplitMix64 state expansion. Integer
/// state only, so sequences are reproducible across platforms. Includes the
/// variate transforms the simulator needs:
///   - uniform doubles in [0, 1) via the top 53 bits,
///   - Gaussian via Box-Muller (pairwise, with a cached spare),
///   - Poisson via inversion by sequential search for mu < 10 and Hormann's
///     PTRD transformed rejection for mu >= 10.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();
    double next_double();  // [0, 1)
    double uniform(double lo, double hi);
    double normal(double mean, double stddev);
    std::uint64_t poisson(double mu);

private:
    std::uint64_t poisson_inversion(double mu);
    std::uint64_t poisson_ptrd(double mu);

    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace fluodecon
