#include "fluodecon/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace fluodecon {

namespace {

void check_region(const Image& image, const Rect& r, const char* what) {
    if (r.width <= 0 || r.height <= 0 || r.x < 0 || r.y < 0 || r.x + r.width > image.width() ||
        r.y + r.height > image.height()) {
        throw std::invalid_argument(std::string(what) + ": region (" + std::to_string(r.x) + "," +
                                    std::to_string(r.y) + " " + std::to_string(r.width) + "x" +
                                    std::to_string(r.height) + ") outside image bounds " +
                                    std::to_string(image.width()) + "x" +
                                    std::to_string(image.height()));
    }
}

bool rects_overlap(const Rect& a, const Rect& b) {
    return a.x < b.x + b.width && b.x < a.x + a.width && a.y < b.y + b.height &&
           b.y < a.y + a.height;
}

double mse_and_peak(const std::vector<const Image*>& test, const std::vector<const Image*>& ref,
                    double* peak_out) {
    double se = 0.0;
    double peak = 0.0;
    std::size_t n = 0;
    for (std::size_t c = 0; c < test.size(); ++c) {
        const auto& t = test[c]->data();
        const auto& r = ref[c]->data();
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double d = t[i] - r[i];
            se += d * d;
            peak = std::max(peak, r[i]);
        }
        n += t.size();
    }
    *peak_out = peak;
    return se / static_cast<double>(n);
}

double psnr_from(double mse, double peak) {
    if (peak <= 0.0) {
        throw std::invalid_argument("psnr: reference peak must be > 0");
    }
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / mse);
}

void write_value(std::ostream& os, double v) {
    if (std::isinf(v)) {
        os << (v > 0 ? "inf" : "-inf");
    } else {
        os << v;
    }
}

}  // namespace

double psnr(const Image& test, const Image& reference) {
    if (!test.same_size(reference)) {
        throw std::invalid_argument("psnr: image dimensions differ");
    }
    double peak = 0.0;
    const double mse = mse_and_peak({&test}, {&reference}, &peak);
    return psnr_from(mse, peak);
}

double psnr(const MultiChannelImage& test, const MultiChannelImage& reference) {
    if (test.channel_count() != reference.channel_count() ||
        test.width() != reference.width() || test.height() != reference.height()) {
        throw std::invalid_argument("psnr: image dimensions differ");
    }
    std::vector<const Image*> t, r;
    for (int c = 0; c < test.channel_count(); ++c) {
        t.push_back(&test.channel(c));
        r.push_back(&reference.channel(c));
    }
    double peak = 0.0;
    const double mse = mse_and_peak(t, r, &peak);
    return psnr_from(mse, peak);
}

double region_mean(const Image& image, const Rect& region) {
    check_region(image, region, "region_mean");
    double sum = 0.0;
    for (int y = region.y; y < region.y + region.height; ++y) {
        const double* row = image.row(y);
        for (int x = region.x; x < region.x + region.width; ++x) sum += row[x];
    }
    return sum / (static_cast<double>(region.width) * region.height);
}

double region_stddev(const Image& image, const Rect& region) {
    const double mean = region_mean(image, region);
    double acc = 0.0;
    for (int y = region.y; y < region.y + region.height; ++y) {
        const double* row = image.row(y);
        for (int x = region.x; x < region.x + region.width; ++x) {
            const double d = row[x] - mean;
            acc += d * d;
        }
    }
    return std::sqrt(acc / (static_cast<double>(region.width) * region.height));
}

double background_snr(const Image& image, const Rect& background_region,
                      const Rect& signal_region) {
    check_region(image, background_region, "background_snr");
    check_region(image, signal_region, "background_snr");
    if (rects_overlap(background_region, signal_region)) {
        throw std::invalid_argument("background_snr: background and signal regions overlap");
    }
    const double signal = region_mean(image, signal_region);
    const double noise = region_stddev(image, background_region);
    if (signal <= 0.0) {
        throw std::invalid_argument("background_snr: signal region mean must be > 0");
    }
    if (noise == 0.0) return std::numeric_limits<double>::infinity();
    return 20.0 * std::log10(signal / noise);
}

double contrast(const Image& image, const Rect& region) {
    check_region(image, region, "contrast");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int y = region.y; y < region.y + region.height; ++y) {
        const double* row = image.row(y);
        for (int x = region.x; x < region.x + region.width; ++x) {
            lo = std::min(lo, row[x]);
            hi = std::max(hi, row[x]);
        }
    }
    if (hi <= 0.0) {
        throw std::invalid_argument("contrast: region is all zero");
    }
    return (hi - lo) / (hi + lo);
}

namespace {

double bilinear(const Image& image, double x, double y) {
    int ix = static_cast<int>(std::floor(x));
    int iy = static_cast<int>(std::floor(y));
    double fx = x - ix;
    double fy = y - iy;
    if (ix < 0) { ix = 0; fx = 0.0; }
    if (iy < 0) { iy = 0; fy = 0.0; }
    if (ix >= image.width() - 1) { ix = image.width() - 1; fx = 0.0; }
    if (iy >= image.height() - 1) { iy = image.height() - 1; fy = 0.0; }
    const int ix1 = std::min(ix + 1, image.width() - 1);
    const int iy1 = std::min(iy + 1, image.height() - 1);
    const double v00 = image.at(ix, iy);
    const double v10 = image.at(ix1, iy);
    const double v01 = image.at(ix, iy1);
    const double v11 = image.at(ix1, iy1);
    return (1.0 - fy) * ((1.0 - fx) * v00 + fx * v10) + fy * ((1.0 - fx) * v01 + fx * v11);
}

}  // namespace

std::vector<double> line_profile(const Image& image, const LineSegment& segment, bool normalize) {
    auto inside = [&](double x, double y) {
        return x >= 0.0 && y >= 0.0 && x <= image.width() - 1.0 && y <= image.height() - 1.0;
    };
    if (!inside(segment.x0, segment.y0) || !inside(segment.x1, segment.y1)) {
        throw std::invalid_argument("line_profile: segment endpoints outside image bounds");
    }
    const double dx = segment.x1 - segment.x0;
    const double dy = segment.y1 - segment.y0;
    const double length = std::hypot(dx, dy);
    const int count = static_cast<int>(std::floor(length + 1e-9)) + 1;

    std::vector<double> samples(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double t = (length > 0.0) ? i / length : 0.0;
        samples[static_cast<std::size_t>(i)] =
            bilinear(image, segment.x0 + t * dx, segment.y0 + t * dy);
    }
    if (normalize) {
        const double peak = *std::max_element(samples.begin(), samples.end());
        if (peak <= 0.0) {
            throw std::invalid_argument("line_profile: cannot normalize an all-zero profile");
        }
        for (double& s : samples) s /= peak;
    }
    return samples;
}

void write_metrics_csv(std::ostream& os, const std::vector<MetricReport>& reports) {
    os << "method,metric,value\n";
    os.precision(17);
    for (const MetricReport& r : reports) {
        if (r.psnr_db) {
            os << r.method_label << ",psnr_db,";
            write_value(os, *r.psnr_db);
            os << '\n';
        }
        if (r.background_snr_db) {
            os << r.method_label << ",background_snr_db,";
            write_value(os, *r.background_snr_db);
            os << '\n';
        }
        if (r.contrast_value) {
            os << r.method_label << ",contrast,";
            write_value(os, *r.contrast_value);
            os << '\n';
        }
    }
}

void write_profile_csv(std::ostream& os, const std::vector<double>& profile) {
    os << "t,intensity\n";
    os.precision(17);
    for (std::size_t i = 0; i < profile.size(); ++i) {
        os << i << ',' << profile[i] << '\n';
    }
}

}  // namespace fluodecon
