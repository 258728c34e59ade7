#include "fluodecon/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fluodecon {

namespace {

inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    SplitMix64 sm(base + 0x9E3779B97F4A7C15ULL * (stream + 1));
    return sm.next();
}

Rng::Rng(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& word : s_) word = sm.next();
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

double Rng::normal(double mean, double stddev) {
    if (has_spare_) {
        has_spare_ = false;
        return mean + stddev * spare_;
    }
    const double u1 = 1.0 - next_double();  // (0, 1], keeps log() finite
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return mean + stddev * r * std::cos(t);
}

std::uint64_t Rng::poisson(double mu) {
    if (!(mu >= 0.0)) {
        throw std::invalid_argument("poisson: rate must be >= 0");
    }
    if (mu == 0.0) return 0;
    return (mu < 10.0) ? poisson_inversion(mu) : poisson_ptrd(mu);
}

std::uint64_t Rng::poisson_inversion(double mu) {
    const double u = next_double();
    double p = std::exp(-mu);
    double cdf = p;
    std::uint64_t k = 0;
    const std::uint64_t cap = 200 + static_cast<std::uint64_t>(20.0 * mu);
    while (u > cdf && k < cap) {
        ++k;
        p *= mu / static_cast<double>(k);
        cdf += p;
    }
    return k;
}

// Hormann's PTRD transformed-rejection sampler; exact for all mu >= 10, no
// normal approximation involved.
std::uint64_t Rng::poisson_ptrd(double mu) {
    const double smu = std::sqrt(mu);
    const double b = 0.931 + 2.53 * smu;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mu = std::log(mu);

    for (;;) {
        const double u = next_double() - 0.5;
        const double v = next_double();
        const double us = 0.5 - std::abs(u);
        const double kd = std::floor((2.0 * a / us + b) * u + mu + 0.43);
        if (us >= 0.07 && v <= v_r) {
            return static_cast<std::uint64_t>(kd);
        }
        if (kd < 0.0 || (us < 0.013 && v > us)) {
            continue;
        }
        const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
        const double rhs = kd * log_mu - mu - std::lgamma(kd + 1.0);
        if (lhs <= rhs) {
            return static_cast<std::uint64_t>(kd);
        }
    }
}

}  // namespace fluodecon
