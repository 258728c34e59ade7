#pragma once

#include <cstdint>
#include <vector>

#include "fluodecon/image.hpp"

namespace fluodecon {

/// Knobs of the synthetic cell-population generator and its degradation
/// model. Defaults reproduce the standard evaluation setup: 4 subcellular
/// structures per cell, overlap allowed, autofluorescence level 0.05, CCD
/// noise variance 0.001.
struct PhantomConfig {
    int width = 256;
    int height = 256;
    int cell_count = 10;
    int structures_per_cell = 4;
    bool allow_overlap = true;
    double autofluorescence = 0.05;   // additive background level in the degraded image
    double ccd_variance = 0.001;      // Gaussian read-noise variance
    double photon_scale = 255.0;      // expected photon count at unit intensity; +inf = noiseless
    double cell_radius_min = 20.0;    // semi-axis range of the cytoplasm ellipse, pixels
    double cell_radius_max = 30.0;
    std::uint64_t seed = 1;

    void validate() const;  // throws std::invalid_argument
};

struct CellPlacement {
    double cx = 0.0, cy = 0.0;       // center
    double axis_a = 0.0, axis_b = 0.0;
    double angle = 0.0;              // radians
};

struct SpotPlacement {
    double x = 0.0, y = 0.0;
    double sigma = 0.0;
    double amplitude = 0.0;
};

/// Placement log filled during generation; one spot entry per subcellular
/// structure actually rendered.
struct PhantomLayout {
    std::vector<CellPlacement> cells;
    std::vector<SpotPlacement> spots;
};

/// Renders the ideal (pre-optics) specimen: cytoplasm, nuclei and
/// subcellular-structure channels, intensities in [0, 1], deterministic
/// under the config seed. Throws if cells cannot fit the image
/// (or, with allow_overlap = false, cannot be placed without overlap).
MultiChannelImage generate_phantom(const PhantomConfig& config, PhantomLayout* layout = nullptr);

/// Measurement simulation, per channel:
///   b = H (x) truth + autofluorescence
///   g = Poisson(photon_scale * b) / photon_scale + N(0, ccd_variance), clamped to >= 0.
/// An infinite photon_scale skips the photon noise; ccd_variance 0 skips the
/// read noise. Deterministic under the given seed.
MultiChannelImage degrade(const MultiChannelImage& truth, const Psf& psf,
                          const PhantomConfig& config, std::uint64_t seed);

struct PhantomPair {
    MultiChannelImage ground_truth;
    MultiChannelImage degraded;
    Psf psf_used;
    PhantomConfig config_used;
};

/// Ground truth plus its degraded counterpart from one generated population.
PhantomPair make_pair(const PhantomConfig& config, const Psf& psf);

}  // namespace fluodecon
