#include "fluodecon/image.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fluodecon {

namespace {

void check_dimensions(int width, int height, std::size_t data_size, const char* what) {
    if (width <= 0 || height <= 0) {
        throw std::invalid_argument(std::string(what) + ": dimensions must be positive, got " +
                                    std::to_string(width) + "x" + std::to_string(height));
    }
    const auto expected = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (data_size != expected) {
        throw std::invalid_argument(std::string(what) + ": data length " +
                                    std::to_string(data_size) + " does not match " +
                                    std::to_string(width) + "x" + std::to_string(height));
    }
}

}  // namespace

Image::Image(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
    check_dimensions(width, height, data_.size(), "Image");
    for (std::size_t i = 0; i < data_.size(); ++i) {
        const double v = data_[i];
        if (!std::isfinite(v)) {
            throw std::invalid_argument("Image: non-finite intensity at index " + std::to_string(i));
        }
        if (v < 0.0) {
            throw std::invalid_argument("Image: negative intensity " + std::to_string(v) +
                                        " at index " + std::to_string(i));
        }
    }
}

Image Image::zeros(int width, int height) {
    return Image(width, height,
                 std::vector<double>(static_cast<std::size_t>(width) * height, 0.0));
}

Image Image::constant(int width, int height, double value) {
    return Image(width, height,
                 std::vector<double>(static_cast<std::size_t>(width) * height, value));
}

double Image::min() const { return *std::min_element(data_.begin(), data_.end()); }
double Image::max() const { return *std::max_element(data_.begin(), data_.end()); }
double Image::sum() const { return std::accumulate(data_.begin(), data_.end(), 0.0); }
double Image::mean() const { return sum() / static_cast<double>(data_.size()); }

MultiChannelImage::MultiChannelImage(std::vector<Image> channels,
                                     std::vector<std::string> channel_names)
    : channels_(std::move(channels)), names_(std::move(channel_names)) {
    if (channels_.empty()) {
        throw std::invalid_argument("MultiChannelImage: needs at least one channel");
    }
    for (const Image& ch : channels_) {
        if (!ch.same_size(channels_.front())) {
            throw std::invalid_argument("MultiChannelImage: channel dimensions differ");
        }
    }
    if (names_.empty()) {
        for (std::size_t i = 0; i < channels_.size(); ++i) {
            names_.push_back("ch" + std::to_string(i));
        }
    }
    if (names_.size() != channels_.size()) {
        throw std::invalid_argument("MultiChannelImage: name count does not match channel count");
    }
}

Psf::Psf(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
    check_dimensions(width, height, data_.size(), "Psf");
    if (width_ % 2 == 0 || height_ % 2 == 0) {
        throw std::invalid_argument("Psf: dimensions must be odd, got " + std::to_string(width_) +
                                    "x" + std::to_string(height_));
    }
    double sum = 0.0;
    for (double v : data_) {
        if (!std::isfinite(v) || v < 0.0) {
            throw std::invalid_argument("Psf: entries must be finite and nonnegative");
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw std::invalid_argument("Psf: entries must sum to 1 (got " + std::to_string(sum) +
                                    "); run normalize_psf first");
    }
}

Psf normalize_psf(const Image& raw) {
    if (raw.width() % 2 == 0 || raw.height() % 2 == 0) {
        throw std::invalid_argument("normalize_psf: kernel dimensions must be odd, got " +
                                    std::to_string(raw.width()) + "x" + std::to_string(raw.height()));
    }
    const double sum = raw.sum();
    if (sum <= 0.0) {
        throw std::invalid_argument("normalize_psf: kernel has no positive entries");
    }
    std::vector<double> scaled(raw.data());
    for (double& v : scaled) v /= sum;
    return Psf(raw.width(), raw.height(), std::move(scaled));
}

void DeconvParams::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("DeconvParams: lambda must be finite and >= 0");
    }
    if (!(beta >= 0.0) || !std::isfinite(beta)) {
        throw std::invalid_argument("DeconvParams: beta must be finite and >= 0");
    }
    if (window_radius < 0) {
        throw std::invalid_argument("DeconvParams: window_radius must be >= 0");
    }
    if (iterations < 1) {
        throw std::invalid_argument("DeconvParams: iterations must be >= 1");
    }
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw std::invalid_argument("DeconvParams: epsilon must be finite and > 0");
    }
}

int window_radius_for_samples(int sample_count) {
    if (sample_count >= 1) {
        const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(sample_count))));
        if (side % 2 == 1 && side * side == sample_count) {
            return (side - 1) / 2;
        }
    }
    throw std::invalid_argument("window sample count " + std::to_string(sample_count) +
                                " is not the square of an odd window side");
}

}  // namespace fluodecon
