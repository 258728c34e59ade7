#include "fluodecon/convolve.hpp"

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace fluodecon {

namespace detail {

int extend_index(int i, int n, BoundaryPolicy boundary) {
    if (i >= 0 && i < n) return i;
    switch (boundary) {
        case BoundaryPolicy::Reflect: {
            // symmetric mirror: ..., f(1), f(0) | f(0), f(1), ...
            const int period = 2 * n;
            int m = i % period;
            if (m < 0) m += period;
            return (m < n) ? m : period - 1 - m;
        }
        case BoundaryPolicy::Replicate:
            return std::clamp(i, 0, n - 1);
        case BoundaryPolicy::ZeroPad:
            return -1;
    }
    return -1;
}

int next_fast_size(int n) {
    for (int m = std::max(n, 1);; ++m) {
        int r = m;
        for (int p : {2, 3, 5, 7}) {
            while (r % p == 0) r /= p;
        }
        if (r == 1) return m;
    }
}

}  // namespace detail

namespace {

void check_fit(const Image& image, const Psf& psf) {
    if (psf.width() > image.width() || psf.height() > image.height()) {
        throw std::invalid_argument("convolve: PSF " + std::to_string(psf.width()) + "x" +
                                    std::to_string(psf.height()) + " exceeds image " +
                                    std::to_string(image.width()) + "x" +
                                    std::to_string(image.height()));
    }
}

// FFTW's planner is not thread-safe; executions of distinct plans are.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwBuffer {
    explicit FftwBuffer(std::size_t doubles)
        : ptr(static_cast<double*>(fftw_malloc(doubles * sizeof(double)))) {
        std::fill(ptr, ptr + doubles, 0.0);
    }
    ~FftwBuffer() { fftw_free(ptr); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    double* ptr;
};

struct FftwComplexBuffer {
    explicit FftwComplexBuffer(std::size_t elems)
        : ptr(static_cast<fftw_complex*>(fftw_malloc(elems * sizeof(fftw_complex)))) {}
    ~FftwComplexBuffer() { fftw_free(ptr); }
    FftwComplexBuffer(const FftwComplexBuffer&) = delete;
    FftwComplexBuffer& operator=(const FftwComplexBuffer&) = delete;
    fftw_complex* ptr;
};

struct FftwPlan {
    fftw_plan plan = nullptr;
    ~FftwPlan() {
        if (plan) {
            std::lock_guard<std::mutex> lock(planner_mutex());
            fftw_destroy_plan(plan);
        }
    }
};

}  // namespace

Psf flip_psf(const Psf& psf) {
    std::vector<double> flipped(psf.data().size());
    const int w = psf.width();
    const int h = psf.height();
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            flipped[static_cast<std::size_t>(h - 1 - y) * w + (w - 1 - x)] = psf.at(x, y);
        }
    }
    return Psf(w, h, std::move(flipped));
}

Image convolve_direct(const Image& image, const Psf& psf, BoundaryPolicy boundary) {
    check_fit(image, psf);
    const int w = image.width();
    const int h = image.height();
    const int pw = psf.width();
    const int ph = psf.height();
    const int rx = psf.radius_x();
    const int ry = psf.radius_y();

    // Source index tables over the extended coordinate range [-r, n+r).
    std::vector<int> row_map(static_cast<std::size_t>(h) + 2 * ry);
    std::vector<int> col_map(static_cast<std::size_t>(w) + 2 * rx);
    for (int t = -ry; t < h + ry; ++t) row_map[static_cast<std::size_t>(t + ry)] = detail::extend_index(t, h, boundary);
    for (int t = -rx; t < w + rx; ++t) col_map[static_cast<std::size_t>(t + rx)] = detail::extend_index(t, w, boundary);

    std::vector<double> out(image.pixel_count());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = 0; i < ph; ++i) {
                const int sy = row_map[static_cast<std::size_t>(y + 2 * ry - i)];
                if (sy < 0) continue;
                const double* src = image.row(sy);
                const double* ker = psf.row(i);
                for (int j = 0; j < pw; ++j) {
                    const int sx = col_map[static_cast<std::size_t>(x + 2 * rx - j)];
                    if (sx < 0) continue;
                    acc += ker[j] * src[sx];
                }
            }
            out[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    return Image(w, h, std::move(out));
}

Image convolve_fft(const Image& image, const Psf& psf, BoundaryPolicy boundary) {
    check_fit(image, psf);
    const int w = image.width();
    const int h = image.height();
    const int pw = psf.width();
    const int ph = psf.height();
    const int rx = psf.radius_x();
    const int ry = psf.radius_y();

    // Boundary-extend by the PSF radius, then linear-convolve the extended
    // image; cropping the center leaves exactly the policy-consistent result.
    const int ew = w + 2 * rx;
    const int eh = h + 2 * ry;
    const int fw = detail::next_fast_size(ew + pw - 1);
    const int fh = detail::next_fast_size(eh + ph - 1);
    const std::size_t real_count = static_cast<std::size_t>(fh) * fw;
    const std::size_t spec_count = static_cast<std::size_t>(fh) * (fw / 2 + 1);

    FftwBuffer img_buf(real_count);
    FftwBuffer psf_buf(real_count);
    for (int y = 0; y < eh; ++y) {
        const int sy = detail::extend_index(y - ry, h, boundary);
        double* dst = img_buf.ptr + static_cast<std::size_t>(y) * fw;
        if (sy < 0) continue;  // already zero
        const double* src = image.row(sy);
        for (int x = 0; x < ew; ++x) {
            const int sx = detail::extend_index(x - rx, w, boundary);
            dst[x] = (sx < 0) ? 0.0 : src[sx];
        }
    }
    for (int y = 0; y < ph; ++y) {
        std::copy(psf.row(y), psf.row(y) + pw, psf_buf.ptr + static_cast<std::size_t>(y) * fw);
    }

    FftwComplexBuffer img_spec(spec_count);
    FftwComplexBuffer psf_spec(spec_count);
    FftwPlan fwd_img, fwd_psf, inv;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fwd_img.plan = fftw_plan_dft_r2c_2d(fh, fw, img_buf.ptr, img_spec.ptr, FFTW_ESTIMATE);
        fwd_psf.plan = fftw_plan_dft_r2c_2d(fh, fw, psf_buf.ptr, psf_spec.ptr, FFTW_ESTIMATE);
        inv.plan = fftw_plan_dft_c2r_2d(fh, fw, img_spec.ptr, img_buf.ptr, FFTW_ESTIMATE);
    }
    fftw_execute(fwd_img.plan);
    fftw_execute(fwd_psf.plan);

    const double scale = 1.0 / static_cast<double>(real_count);
    for (std::size_t i = 0; i < spec_count; ++i) {
        const double ar = img_spec.ptr[i][0];
        const double ai = img_spec.ptr[i][1];
        const double br = psf_spec.ptr[i][0];
        const double bi = psf_spec.ptr[i][1];
        img_spec.ptr[i][0] = (ar * br - ai * bi) * scale;
        img_spec.ptr[i][1] = (ar * bi + ai * br) * scale;
    }
    fftw_execute(inv.plan);

    std::vector<double> out(image.pixel_count());
    for (int y = 0; y < h; ++y) {
        const double* src = img_buf.ptr + static_cast<std::size_t>(y + 2 * ry) * fw + 2 * rx;
        double* dst = out.data() + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            dst[x] = std::max(src[x], 0.0);  // clamp FFT round-off
        }
    }
    return Image(w, h, std::move(out));
}

}  // namespace fluodecon
