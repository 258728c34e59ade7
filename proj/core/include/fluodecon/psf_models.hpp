#pragma once

#include <string>

#include "fluodecon/image.hpp"

namespace fluodecon {

/// Synthetic PSF families. The shape parameter in use depends on `kind`;
/// support is the square (2 * support_radius + 1)^2 sampling grid.
struct PsfModel {
    enum class Kind { Gaussian, Airy, Disk };

    Kind kind = Kind::Gaussian;
    double sigma = 2.0;              // Gaussian: exp(-r^2 / 2 sigma^2)
    double first_zero_radius = 3.0;  // Airy: radius of the first dark ring, pixels
    double disk_radius = 2.0;        // Disk: indicator of r <= disk_radius
    int support_radius = 6;

    void validate() const;  // throws std::invalid_argument
};

PsfModel::Kind psf_kind_from_name(const std::string& name);  // "gaussian" | "airy" | "disk"
std::string psf_kind_name(PsfModel::Kind kind);

/// Samples the model on its support grid and normalizes to unit sum. If a
/// Gaussian support radius is too small to contain 99% of the mass, a note
/// is placed in *warning (when given).
Psf render_psf(const PsfModel& model, std::string* warning = nullptr);

/// Reads a PSF from a plain-text matrix file ("width height" then rows) or
/// from any grayscale raster format, then normalizes it.
Psf load_psf(const std::string& path);

/// Bessel function of the first kind, order 1. Power series below |x| = 14,
/// Hankel asymptotic expansion above; absolute error under 1e-9.
double bessel_j1(double x);

}  // namespace fluodecon
