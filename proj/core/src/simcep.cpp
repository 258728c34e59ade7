#include "fluodecon/simcep.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fluodecon/convolve.hpp"
#include "fluodecon/rng.hpp"

namespace fluodecon {

namespace {

constexpr double kEdgeWidth = 0.05;        // soft-edge width as a fraction of the radius
constexpr double kMaxPerturbTotal = 0.18;  // three harmonics at <= 0.06 each
constexpr int kPerturbHarmonics = 3;       // cos(2t), cos(3t), cos(4t)

double smoothstep(double t) {
    t = std::clamp(t, 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

struct CellShape {
    CellPlacement placement;
    double pert_amp[kPerturbHarmonics];
    double pert_phase[kPerturbHarmonics];
    double margin = 0.0;  // conservative bounding radius
};

void splat_ellipse(std::vector<double>& buf, int w, int h, const CellShape& shape,
                   double scale_a, double scale_b, double cx, double cy, double amplitude,
                   double edge_width, bool perturb) {
    const double a = shape.placement.axis_a * scale_a;
    const double b = shape.placement.axis_b * scale_b;
    const double ct = std::cos(shape.placement.angle);
    const double st = std::sin(shape.placement.angle);
    const double reach = std::max(a, b) * (1.0 + kMaxPerturbTotal) + 2.0;
    const int x0 = std::max(0, static_cast<int>(std::floor(cx - reach)));
    const int x1 = std::min(w - 1, static_cast<int>(std::ceil(cx + reach)));
    const int y0 = std::max(0, static_cast<int>(std::floor(cy - reach)));
    const int y1 = std::min(h - 1, static_cast<int>(std::ceil(cy + reach)));
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const double dx = x - cx;
            const double dy = y - cy;
            const double xr = dx * ct + dy * st;
            const double yr = -dx * st + dy * ct;
            double rho = std::sqrt((xr / a) * (xr / a) + (yr / b) * (yr / b));
            if (perturb) {
                const double ang = std::atan2(yr / b, xr / a);
                double p = 1.0;
                for (int k = 0; k < kPerturbHarmonics; ++k) {
                    p += shape.pert_amp[k] * std::cos((k + 2) * ang + shape.pert_phase[k]);
                }
                rho /= p;
            }
            const double v = amplitude * smoothstep((1.0 - rho) / edge_width);
            buf[static_cast<std::size_t>(y) * w + x] += v;
        }
    }
}

void splat_gaussian(std::vector<double>& buf, int w, int h, const SpotPlacement& spot) {
    const double reach = 4.0 * spot.sigma;
    const int x0 = std::max(0, static_cast<int>(std::floor(spot.x - reach)));
    const int x1 = std::min(w - 1, static_cast<int>(std::ceil(spot.x + reach)));
    const int y0 = std::max(0, static_cast<int>(std::floor(spot.y - reach)));
    const int y1 = std::min(h - 1, static_cast<int>(std::ceil(spot.y + reach)));
    const double inv_two_sigma2 = 1.0 / (2.0 * spot.sigma * spot.sigma);
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const double d2 = (x - spot.x) * (x - spot.x) + (y - spot.y) * (y - spot.y);
            buf[static_cast<std::size_t>(y) * w + x] += spot.amplitude * std::exp(-d2 * inv_two_sigma2);
        }
    }
}

void clamp_unit(std::vector<double>& buf) {
    for (double& v : buf) v = std::clamp(v, 0.0, 1.0);
}

}  // namespace

void PhantomConfig::validate() const {
    if (width <= 0 || height <= 0) {
        throw std::invalid_argument("PhantomConfig: dimensions must be positive");
    }
    if (cell_count < 0 || structures_per_cell < 0) {
        throw std::invalid_argument("PhantomConfig: counts must be >= 0");
    }
    if (!(autofluorescence >= 0.0) || !std::isfinite(autofluorescence)) {
        throw std::invalid_argument("PhantomConfig: autofluorescence must be finite and >= 0");
    }
    if (!(ccd_variance >= 0.0) || !std::isfinite(ccd_variance)) {
        throw std::invalid_argument("PhantomConfig: ccd_variance must be finite and >= 0");
    }
    if (!(photon_scale > 0.0)) {  // +inf allowed: noiseless limit
        throw std::invalid_argument("PhantomConfig: photon_scale must be > 0");
    }
    if (!(cell_radius_min > 0.0) || !(cell_radius_max >= cell_radius_min) ||
        !std::isfinite(cell_radius_max)) {
        throw std::invalid_argument("PhantomConfig: need 0 < cell_radius_min <= cell_radius_max");
    }
}

MultiChannelImage generate_phantom(const PhantomConfig& config, PhantomLayout* layout) {
    config.validate();
    const int w = config.width;
    const int h = config.height;
    Rng rng(derive_seed(config.seed, 0));

    std::vector<double> cyto(static_cast<std::size_t>(w) * h, 0.0);
    std::vector<double> nuclei(cyto.size(), 0.0);
    std::vector<double> spots(cyto.size(), 0.0);

    std::vector<CellShape> placed;
    for (int c = 0; c < config.cell_count; ++c) {
        CellShape shape;
        shape.placement.axis_a = rng.uniform(config.cell_radius_min, config.cell_radius_max);
        shape.placement.axis_b = rng.uniform(config.cell_radius_min, config.cell_radius_max);
        shape.margin =
            std::max(shape.placement.axis_a, shape.placement.axis_b) * (1.0 + kMaxPerturbTotal);
        if (2.0 * shape.margin >= std::min(w, h) - 1.0) {
            throw std::invalid_argument("generate_phantom: cell of radius " +
                                        std::to_string(shape.margin) + " px cannot fit a " +
                                        std::to_string(w) + "x" + std::to_string(h) + " image");
        }

        const int max_attempts = config.allow_overlap ? 1 : 100;
        bool ok = false;
        for (int attempt = 0; attempt < max_attempts && !ok; ++attempt) {
            shape.placement.cx = rng.uniform(shape.margin, w - 1.0 - shape.margin);
            shape.placement.cy = rng.uniform(shape.margin, h - 1.0 - shape.margin);
            ok = true;
            if (!config.allow_overlap) {
                for (const CellShape& other : placed) {
                    const double d = std::hypot(shape.placement.cx - other.placement.cx,
                                                shape.placement.cy - other.placement.cy);
                    if (d < shape.margin + other.margin) {
                        ok = false;
                        break;
                    }
                }
            }
        }
        if (!ok) {
            throw std::invalid_argument(
                "generate_phantom: could not place cell " + std::to_string(c) +
                " without overlap; reduce cell_count or cell radii, or allow overlap");
        }

        shape.placement.angle = rng.uniform(0.0, std::numbers::pi);  // [0, pi)
        for (int k = 0; k < kPerturbHarmonics; ++k) {
            shape.pert_amp[k] = rng.uniform(0.0, 0.06);
            shape.pert_phase[k] = rng.uniform(0.0, 2.0 * std::numbers::pi);
        }
        const double cyto_amp = rng.uniform(0.45, 0.7);
        splat_ellipse(cyto, w, h, shape, 1.0, 1.0, shape.placement.cx, shape.placement.cy,
                      cyto_amp, kEdgeWidth, true);

        const double nucleus_scale = rng.uniform(0.38, 0.48);
        const double off_a = rng.uniform(-0.25, 0.25) * shape.placement.axis_a;
        const double off_b = rng.uniform(-0.25, 0.25) * shape.placement.axis_b;
        const double ct = std::cos(shape.placement.angle);
        const double st = std::sin(shape.placement.angle);
        const double ncx = shape.placement.cx + off_a * ct - off_b * st;
        const double ncy = shape.placement.cy + off_a * st + off_b * ct;
        const double nuc_amp = rng.uniform(0.7, 1.0);
        splat_ellipse(nuclei, w, h, shape, nucleus_scale, nucleus_scale, ncx, ncy, nuc_amp,
                      kEdgeWidth * 1.5, false);

        for (int s = 0; s < config.structures_per_cell; ++s) {
            SpotPlacement spot;
            const double rr = 0.75 * std::sqrt(rng.next_double());  // area-uniform in the cell
            const double ang = rng.uniform(0.0, 2.0 * std::numbers::pi);
            const double ex = rr * shape.placement.axis_a * std::cos(ang);
            const double ey = rr * shape.placement.axis_b * std::sin(ang);
            spot.x = shape.placement.cx + ex * ct - ey * st;
            spot.y = shape.placement.cy + ex * st + ey * ct;
            spot.sigma = rng.uniform(1.1, 1.6);
            spot.amplitude = rng.uniform(0.75, 1.0);
            splat_gaussian(spots, w, h, spot);
            if (layout != nullptr) layout->spots.push_back(spot);
        }
        if (layout != nullptr) layout->cells.push_back(shape.placement);
        placed.push_back(shape);
    }

    clamp_unit(cyto);
    clamp_unit(nuclei);
    clamp_unit(spots);
    std::vector<Image> channels;
    channels.emplace_back(w, h, std::move(cyto));
    channels.emplace_back(w, h, std::move(nuclei));
    channels.emplace_back(w, h, std::move(spots));
    return MultiChannelImage(std::move(channels), {"cytoplasm", "nuclei", "subcellular"});
}

MultiChannelImage degrade(const MultiChannelImage& truth, const Psf& psf,
                          const PhantomConfig& config, std::uint64_t seed) {
    config.validate();
    const bool poisson_stage = std::isfinite(config.photon_scale);
    const bool read_noise_stage = config.ccd_variance > 0.0;
    const double read_sigma = std::sqrt(config.ccd_variance);

    std::vector<Image> channels;
    channels.reserve(static_cast<std::size_t>(truth.channel_count()));
    for (int c = 0; c < truth.channel_count(); ++c) {
        const Image blurred = convolve_fft(truth.channel(c), psf, BoundaryPolicy::Reflect);
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
        std::vector<double> out(blurred.pixel_count());
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double b = blurred.data()[i] + config.autofluorescence;
            double g = b;
            if (poisson_stage) {
                g = static_cast<double>(rng.poisson(config.photon_scale * b)) / config.photon_scale;
            }
            if (read_noise_stage) {
                g += rng.normal(0.0, read_sigma);
            }
            out[i] = std::max(g, 0.0);
        }
        channels.emplace_back(truth.width(), truth.height(), std::move(out));
    }
    return MultiChannelImage(std::move(channels), truth.channel_names());
}

PhantomPair make_pair(const PhantomConfig& config, const Psf& psf) {
    MultiChannelImage truth = generate_phantom(config);
    MultiChannelImage degraded = degrade(truth, psf, config, derive_seed(config.seed, 1));
    return PhantomPair{std::move(truth), std::move(degraded), psf, config};
}

}  // namespace fluodecon
