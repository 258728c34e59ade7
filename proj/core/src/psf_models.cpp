#include "fluodecon/psf_models.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "fluodecon/image_io.hpp"

namespace fluodecon {

namespace {

// First positive zero of J1.
constexpr double kJ1FirstZero = 3.8317059702075123;

double j1_series(double x) {
    // J1(x) = sum_k (-1)^k (x/2)^(2k+1) / (k! (k+1)!); fine for |x| < 14.
    const double half = 0.5 * x;
    const double h2 = half * half;
    double term = half;
    double sum = term;
    for (int k = 1; k <= 40; ++k) {
        term *= -h2 / (static_cast<double>(k) * (k + 1));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum) + 1e-300) break;
    }
    return sum;
}

double j1_asymptotic(double x) {
    // Hankel expansion: J1(x) ~ sqrt(2/(pi x)) [P cos(w) - Q sin(w)],
    // w = x - 3 pi / 4, with a_k = prod_{j<=k} (4 - (2j-1)^2) / (k! 8^k).
    const double w = x - 0.75 * std::numbers::pi;
    double ak = 1.0;
    double p = 1.0;  // k = 0 term
    double q = 0.0;
    double inv_xk = 1.0;
    for (int k = 1; k <= 11; ++k) {
        const double odd = 2.0 * k - 1.0;
        ak *= (4.0 - odd * odd) / (8.0 * k);
        inv_xk /= x;
        const double term = ak * inv_xk;
        const int pair = k / 2;
        const double sign = (pair % 2 == 0) ? 1.0 : -1.0;
        if (k % 2 == 0) {
            p += sign * term;
        } else {
            q += sign * term;
        }
    }
    return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(w) - q * std::sin(w));
}

}  // namespace

double bessel_j1(double x) {
    const double ax = std::abs(x);
    const double v = (ax < 14.0) ? j1_series(ax) : j1_asymptotic(ax);
    return (x < 0.0) ? -v : v;  // J1 is odd
}

void PsfModel::validate() const {
    if (support_radius < 0) {
        throw std::invalid_argument("PsfModel: support_radius must be >= 0");
    }
    switch (kind) {
        case Kind::Gaussian:
            if (!(sigma > 0.0) || !std::isfinite(sigma)) {
                throw std::invalid_argument("PsfModel: Gaussian sigma must be finite and > 0");
            }
            break;
        case Kind::Airy:
            if (!(first_zero_radius > 0.0) || !std::isfinite(first_zero_radius)) {
                throw std::invalid_argument("PsfModel: Airy first_zero_radius must be finite and > 0");
            }
            break;
        case Kind::Disk:
            if (!(disk_radius >= 0.0) || !std::isfinite(disk_radius)) {
                throw std::invalid_argument("PsfModel: disk_radius must be finite and >= 0");
            }
            break;
    }
}

PsfModel::Kind psf_kind_from_name(const std::string& name) {
    if (name == "gaussian") return PsfModel::Kind::Gaussian;
    if (name == "airy") return PsfModel::Kind::Airy;
    if (name == "disk") return PsfModel::Kind::Disk;
    throw std::invalid_argument("unknown PSF model '" + name +
                                "' (expected gaussian, airy or disk)");
}

std::string psf_kind_name(PsfModel::Kind kind) {
    switch (kind) {
        case PsfModel::Kind::Gaussian: return "gaussian";
        case PsfModel::Kind::Airy: return "airy";
        case PsfModel::Kind::Disk: return "disk";
    }
    return "?";
}

Psf render_psf(const PsfModel& model, std::string* warning) {
    model.validate();
    const int radius = model.support_radius;
    const int side = 2 * radius + 1;
    std::vector<double> data(static_cast<std::size_t>(side) * side, 0.0);
    for (int y = -radius; y <= radius; ++y) {
        for (int x = -radius; x <= radius; ++x) {
            const double r = std::hypot(static_cast<double>(x), static_cast<double>(y));
            double v = 0.0;
            switch (model.kind) {
                case PsfModel::Kind::Gaussian:
                    v = std::exp(-r * r / (2.0 * model.sigma * model.sigma));
                    break;
                case PsfModel::Kind::Airy: {
                    const double arg = kJ1FirstZero * r / model.first_zero_radius;
                    // [2 J1(t)/t]^2 -> 1 as t -> 0
                    const double amp = (arg < 1e-9) ? 1.0 : 2.0 * bessel_j1(arg) / arg;
                    v = amp * amp;
                    break;
                }
                case PsfModel::Kind::Disk:
                    v = (r <= model.disk_radius) ? 1.0 : 0.0;
                    break;
            }
            data[static_cast<std::size_t>(y + radius) * side + (x + radius)] = v;
        }
    }
    if (warning != nullptr && model.kind == PsfModel::Kind::Gaussian) {
        // Mass of a 2D Gaussian inside the square support is erf(R/(sigma sqrt 2))^2.
        const double e = std::erf(radius / (model.sigma * std::numbers::sqrt2));
        if (e * e < 0.99) {
            *warning = "support radius " + std::to_string(radius) + " holds only " +
                       std::to_string(100.0 * e * e) + "% of a sigma=" +
                       std::to_string(model.sigma) + " Gaussian (< 99%)";
        }
    }
    return normalize_psf(Image(side, side, std::move(data)));
}

Psf load_psf(const std::string& path) {
    return normalize_psf(read_grayscale(path));
}

}  // namespace fluodecon
