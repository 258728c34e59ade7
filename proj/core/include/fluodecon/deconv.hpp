#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fluodecon/convolve.hpp"
#include "fluodecon/image.hpp"

namespace fluodecon {

enum class Method {
    LucyRichardson,
    MapHunt,  // prior mean = the measured image
    MapD,     // prior mean = dynamically updated kernel-weighted local mean
};

Method method_from_name(const std::string& name);  // "lr" | "map-hunt" | "map-d"
std::string method_name(Method method);

struct IterationRecord {
    int iteration = 0;            // 1-based
    double mean_abs_update = 0.0; // mean |f_next - f| over pixels
    double min_intensity = 0.0;
    double max_intensity = 0.0;
    double psnr_db = 0.0;         // valid only when has_psnr
    bool has_psnr = false;
};

struct IterationTrace {
    std::vector<IterationRecord> records;

    /// CSV with header "iter,mean_abs_update,min,max,psnr"; the psnr column
    /// is left empty when no ground truth was supplied.
    void write_csv(std::ostream& os) const;
};

/// One Richardson-Lucy multiplicative update:
///   f' = f * [ flip(H) (x) ( g / max(H (x) f, epsilon) ) ].
Image lr_step(const Image& iterate, const Image& measured, const Psf& psf, double epsilon,
              BoundaryPolicy boundary = BoundaryPolicy::Reflect);

/// LR update plus the relaxation term lambda * f * (E(f) - f) with E(f) the
/// kernel-weighted local mean recomputed from the current iterate
/// (expectation_map). Negative results clamp to 0.
Image mapd_step(const Image& iterate, const Image& measured, const Psf& psf,
                const DeconvParams& params, BoundaryPolicy boundary = BoundaryPolicy::Reflect,
                int threads = 1);

/// LR update plus lambda * f * (g - f): the classical variant that uses the
/// measured image as the prior mean. Negative results clamp to 0.
Image maphunt_step(const Image& iterate, const Image& measured, const Psf& psf, double lambda,
                   double epsilon, BoundaryPolicy boundary = BoundaryPolicy::Reflect);

struct DeconvResult {
    Image image;
    IterationTrace trace;
};

/// Runs exactly params.iterations steps of the chosen method starting from
/// f0 = measured. Throws NumericalError (with the iteration index) if an
/// iterate stops being finite. Deterministic: identical inputs give
/// bit-identical outputs for any thread count.
DeconvResult deconvolve(const Image& measured, const Psf& psf, Method method,
                        const DeconvParams& params, const Image* ground_truth = nullptr,
                        int threads = 1, BoundaryPolicy boundary = BoundaryPolicy::Reflect);

/// Per-channel deconvolution with shared parameters and PSF.
MultiChannelImage deconvolve_multichannel(const MultiChannelImage& measured, const Psf& psf,
                                          Method method, const DeconvParams& params,
                                          int threads = 1,
                                          BoundaryPolicy boundary = BoundaryPolicy::Reflect);

}  // namespace fluodecon
