#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fluodecon/image.hpp"

namespace fluodecon {

/// Axis-aligned pixel rectangle, inclusive origin, exclusive extent.
struct Rect {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;
};

/// Sampling segment between two pixel-coordinate endpoints (inclusive).
struct LineSegment {
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 0.0;
    double y1 = 0.0;
};

/// Peak signal-to-noise ratio in dB: 10 log10(peak^2 / MSE) with
/// peak = max(reference). Identical images give +infinity.
double psnr(const Image& test, const Image& reference);

/// Multichannel PSNR: one MSE over all channels jointly, peak over all
/// reference channels.
double psnr(const MultiChannelImage& test, const MultiChannelImage& reference);

/// 20 log10(mean(signal region) / stddev(background region)), in dB.
/// Population standard deviation. A constant background gives +infinity.
/// Regions must lie inside the image and must not overlap.
double background_snr(const Image& image, const Rect& background_region,
                      const Rect& signal_region);

/// Michelson contrast (max - min) / (max + min) over the region.
/// Throws on an all-zero region.
double contrast(const Image& image, const Rect& region);

/// Bilinear samples at unit spacing along the segment, endpoints included.
/// With normalize, samples are divided by their maximum (which must be > 0).
std::vector<double> line_profile(const Image& image, const LineSegment& segment, bool normalize);

double region_mean(const Image& image, const Rect& region);
double region_stddev(const Image& image, const Rect& region);

/// Metric values for one method-vs-reference comparison.
struct MetricReport {
    std::string method_label;
    std::optional<double> psnr_db;            // only with a ground-truth reference
    std::optional<double> background_snr_db;
    std::optional<double> contrast_value;
    std::vector<std::pair<std::string, std::vector<double>>> profiles;  // label -> samples
};

/// One "method,metric,value" row per populated metric; infinities are
/// written as "inf".
void write_metrics_csv(std::ostream& os, const std::vector<MetricReport>& reports);

/// "t,intensity" rows, one per sample.
void write_profile_csv(std::ostream& os, const std::vector<double>& profile);

}  // namespace fluodecon
