#pragma once

#include "fluodecon/image.hpp"

namespace fluodecon {

/// Parameters of the kernel-weighted local mean.
struct KernelConfig {
    double beta = 625.0;    // Gaussian bandwidth, 1/intensity^2
    int window_radius = 4;  // 4 -> 9x9 window, 81 samples

    void validate() const;  // throws std::invalid_argument
};

/// Gaussian similarity weight exp(-beta * (fi - fs)^2), in (0, 1].
double kernel_weight(double fi, double fs, double beta);

/// Per-pixel prior-mean estimate: for each site s, the kernel-weighted mean
/// of the window around s,
///
///   E(s) = sum_{i in W_s} K(f_i - f_s) f_i / sum_{i in W_s} K(f_i - f_s).
///
/// Weighting by the *neighbor* values f_i is what makes this a Parzen-style
/// local mean; weighting f_s itself would collapse the estimate to f_s and
/// the downstream relaxation term would vanish. Windows are clipped at the
/// image border, which keeps every output a convex combination of window
/// values. Per-pixel summation is fixed row-major, so results are identical
/// for any thread count.
Image expectation_map(const Image& iterate, const KernelConfig& config, int threads = 1);

/// Brute-force double-loop evaluation of the same definition, kept free of
/// the tiling and batching tricks in expectation_map. Oracle for tests;
/// expectation_map must agree with it to 1e-12.
Image expectation_map_reference(const Image& iterate, const KernelConfig& config);

}  // namespace fluodecon
