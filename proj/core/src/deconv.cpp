#include "fluodecon/deconv.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "fluodecon/errors.hpp"
#include "fluodecon/expectation.hpp"
#include "fluodecon/metrics.hpp"

namespace fluodecon {

Method method_from_name(const std::string& name) {
    if (name == "lr") return Method::LucyRichardson;
    if (name == "map-hunt") return Method::MapHunt;
    if (name == "map-d") return Method::MapD;
    throw std::invalid_argument("unknown method '" + name + "' (expected lr, map-hunt or map-d)");
}

std::string method_name(Method method) {
    switch (method) {
        case Method::LucyRichardson: return "lr";
        case Method::MapHunt: return "map-hunt";
        case Method::MapD: return "map-d";
    }
    return "?";
}

void IterationTrace::write_csv(std::ostream& os) const {
    os << "iter,mean_abs_update,min,max,psnr\n";
    os.precision(17);
    for (const IterationRecord& r : records) {
        os << r.iteration << ',' << r.mean_abs_update << ',' << r.min_intensity << ','
           << r.max_intensity << ',';
        if (r.has_psnr) os << r.psnr_db;
        os << '\n';
    }
}

namespace {

void check_same_size(const Image& a, const Image& b, const char* what) {
    if (!a.same_size(b)) {
        throw std::invalid_argument(std::string(what) + ": image dimensions differ (" +
                                    std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                                    " vs " + std::to_string(b.width()) + "x" +
                                    std::to_string(b.height()) + ")");
    }
}

}  // namespace

Image lr_step(const Image& iterate, const Image& measured, const Psf& psf, double epsilon,
              BoundaryPolicy boundary) {
    check_same_size(iterate, measured, "lr_step");
    const Image blurred = convolve_fft(iterate, psf, boundary);
    std::vector<double> ratio(iterate.pixel_count());
    for (std::size_t i = 0; i < ratio.size(); ++i) {
        ratio[i] = measured.data()[i] / std::max(blurred.data()[i], epsilon);
    }
    const Image correction =
        convolve_fft(Image(iterate.width(), iterate.height(), std::move(ratio)), flip_psf(psf),
                     boundary);
    std::vector<double> out(iterate.pixel_count());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = iterate.data()[i] * correction.data()[i];
    }
    return Image(iterate.width(), iterate.height(), std::move(out));
}

Image mapd_step(const Image& iterate, const Image& measured, const Psf& psf,
                const DeconvParams& params, BoundaryPolicy boundary, int threads) {
    params.validate();
    Image base = lr_step(iterate, measured, psf, params.epsilon, boundary);
    if (params.lambda == 0.0) return base;  // the relaxation term is exactly zero

    const Image expectation =
        expectation_map(iterate, KernelConfig{params.beta, params.window_radius}, threads);
    std::vector<double> out(iterate.pixel_count());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double f = iterate.data()[i];
        const double v = base.data()[i] + params.lambda * f * (expectation.data()[i] - f);
        out[i] = std::max(v, 0.0);
    }
    return Image(iterate.width(), iterate.height(), std::move(out));
}

Image maphunt_step(const Image& iterate, const Image& measured, const Psf& psf, double lambda,
                   double epsilon, BoundaryPolicy boundary) {
    Image base = lr_step(iterate, measured, psf, epsilon, boundary);
    if (lambda == 0.0) return base;

    std::vector<double> out(iterate.pixel_count());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double f = iterate.data()[i];
        const double v = base.data()[i] + lambda * f * (measured.data()[i] - f);
        out[i] = std::max(v, 0.0);
    }
    return Image(iterate.width(), iterate.height(), std::move(out));
}

DeconvResult deconvolve(const Image& measured, const Psf& psf, Method method,
                        const DeconvParams& params, const Image* ground_truth, int threads,
                        BoundaryPolicy boundary) {
    params.validate();
    if (ground_truth != nullptr) check_same_size(measured, *ground_truth, "deconvolve");

    Image iterate = measured;  // f^0 = g
    IterationTrace trace;
    trace.records.reserve(static_cast<std::size_t>(params.iterations));
    for (int j = 1; j <= params.iterations; ++j) {
        Image next = Image();
        try {
            switch (method) {
                case Method::LucyRichardson:
                    next = lr_step(iterate, measured, psf, params.epsilon, boundary);
                    break;
                case Method::MapHunt:
                    next = maphunt_step(iterate, measured, psf, params.lambda, params.epsilon,
                                        boundary);
                    break;
                case Method::MapD:
                    next = mapd_step(iterate, measured, psf, params, boundary, threads);
                    break;
            }
        } catch (const std::invalid_argument& e) {
            // The Image constructor rejects non-finite intermediates.
            throw NumericalError("deconvolve: iteration " + std::to_string(j) + ": " + e.what());
        }

        IterationRecord rec;
        rec.iteration = j;
        double abs_update = 0.0;
        for (std::size_t i = 0; i < next.pixel_count(); ++i) {
            abs_update += std::abs(next.data()[i] - iterate.data()[i]);
        }
        rec.mean_abs_update = abs_update / static_cast<double>(next.pixel_count());
        rec.min_intensity = next.min();
        rec.max_intensity = next.max();
        if (ground_truth != nullptr) {
            rec.has_psnr = true;
            rec.psnr_db = psnr(next, *ground_truth);
        }
        trace.records.push_back(rec);
        iterate = std::move(next);
    }
    return DeconvResult{std::move(iterate), std::move(trace)};
}

MultiChannelImage deconvolve_multichannel(const MultiChannelImage& measured, const Psf& psf,
                                          Method method, const DeconvParams& params, int threads,
                                          BoundaryPolicy boundary) {
    std::vector<Image> channels;
    channels.reserve(static_cast<std::size_t>(measured.channel_count()));
    for (int c = 0; c < measured.channel_count(); ++c) {
        channels.push_back(
            deconvolve(measured.channel(c), psf, method, params, nullptr, threads, boundary).image);
    }
    return MultiChannelImage(std::move(channels), measured.channel_names());
}

}  // namespace fluodecon
