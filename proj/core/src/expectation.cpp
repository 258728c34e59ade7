#include "fluodecon/expectation.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fluodecon/parallel.hpp"
#include "fast_exp.hpp"

namespace fluodecon {

void KernelConfig::validate() const {
    if (!std::isfinite(beta) || beta < 0.0) {
        throw std::invalid_argument("KernelConfig: beta must be finite and >= 0");
    }
    if (window_radius < 0) {
        throw std::invalid_argument("KernelConfig: window_radius must be >= 0");
    }
}

double kernel_weight(double fi, double fs, double beta) {
    const double d = fi - fs;
    return std::exp(-beta * d * d);
}

Image expectation_map(const Image& iterate, const KernelConfig& config, int threads) {
    config.validate();
    const int w = iterate.width();
    const int h = iterate.height();
    const int radius = config.window_radius;
    const double neg_beta = -config.beta;
    const int side = 2 * radius + 1;

    std::vector<double> out(iterate.pixel_count());
    parallel_chunks(0, h, threads, [&](int y_begin, int y_end) {
        std::vector<double> arg(static_cast<std::size_t>(side) * side);
        std::vector<double> weight(arg.size());
        std::vector<double> value(arg.size());
        for (int y = y_begin; y < y_end; ++y) {
            const int wy0 = std::max(0, y - radius);
            const int wy1 = std::min(h, y + radius + 1);
            double* out_row = out.data() + static_cast<std::size_t>(y) * w;
            for (int x = 0; x < w; ++x) {
                const int wx0 = std::max(0, x - radius);
                const int wx1 = std::min(w, x + radius + 1);
                const double fs = iterate.at(x, y);
                int n = 0;
                for (int wy = wy0; wy < wy1; ++wy) {
                    const double* src = iterate.row(wy);
                    for (int wx = wx0; wx < wx1; ++wx) {
                        const double fi = src[wx];
                        const double d = fi - fs;
                        arg[n] = neg_beta * d * d;
                        value[n] = fi;
                        ++n;
                    }
                }
                detail::exp_batch_nonpositive(arg.data(), weight.data(), n);
                double num = 0.0;
                double den = 0.0;
                for (int k = 0; k < n; ++k) {
                    num += weight[k] * value[k];
                    den += weight[k];
                }
                out_row[x] = num / den;
            }
        }
    });
    return Image(w, h, std::move(out));
}

Image expectation_map_reference(const Image& iterate, const KernelConfig& config) {
    config.validate();
    const int w = iterate.width();
    const int h = iterate.height();
    const int radius = config.window_radius;

    std::vector<double> out(iterate.pixel_count());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double fs = iterate.at(x, y);
            double num = 0.0;
            double den = 0.0;
            for (int wy = std::max(0, y - radius); wy < std::min(h, y + radius + 1); ++wy) {
                for (int wx = std::max(0, x - radius); wx < std::min(w, x + radius + 1); ++wx) {
                    const double fi = iterate.at(wx, wy);
                    const double k = kernel_weight(fi, fs, config.beta);
                    num += k * fi;
                    den += k;
                }
            }
            out[static_cast<std::size_t>(y) * w + x] = num / den;
        }
    }
    return Image(w, h, std::move(out));
}

}  // namespace fluodecon
