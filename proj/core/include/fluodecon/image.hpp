#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace fluodecon {

/// Single-channel 2D intensity raster, row-major doubles.
///
/// Every intensity is finite and >= 0; the constructor rejects anything else,
/// so holding an Image is proof the invariant holds. Instances are immutable;
/// algorithms assemble a plain buffer and wrap it when done.
class Image {
public:
    Image() = default;
    Image(int width, int height, std::vector<double> data);

    static Image zeros(int width, int height);
    static Image constant(int width, int height, double value);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t pixel_count() const { return data_.size(); }

    double at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    const double* row(int y) const { return data_.data() + static_cast<std::size_t>(y) * width_; }
    const std::vector<double>& data() const { return data_; }

    double min() const;
    double max() const;
    double sum() const;
    double mean() const;

    bool same_size(const Image& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

/// Ordered set of co-registered channels (RGB fluorescence stains and the
/// like). At least one channel; all channels share dimensions.
class MultiChannelImage {
public:
    MultiChannelImage() = default;
    explicit MultiChannelImage(std::vector<Image> channels,
                               std::vector<std::string> channel_names = {});

    int width() const { return channels_.front().width(); }
    int height() const { return channels_.front().height(); }
    int channel_count() const { return static_cast<int>(channels_.size()); }

    const Image& channel(int i) const { return channels_[static_cast<std::size_t>(i)]; }
    const std::vector<Image>& channels() const { return channels_; }
    const std::string& channel_name(int i) const { return names_[static_cast<std::size_t>(i)]; }
    const std::vector<std::string>& channel_names() const { return names_; }

private:
    std::vector<Image> channels_;
    std::vector<std::string> names_;
};

/// Point spread function: odd-dimensioned nonnegative kernel with unit sum
/// (|sum - 1| <= 1e-12), so convolving a constant image leaves it unchanged.
class Psf {
public:
    Psf() = default;
    Psf(int width, int height, std::vector<double> data);

    int width() const { return width_; }
    int height() const { return height_; }
    int radius_x() const { return (width_ - 1) / 2; }
    int radius_y() const { return (height_ - 1) / 2; }

    double at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    const double* row(int y) const { return data_.data() + static_cast<std::size_t>(y) * width_; }
    const std::vector<double>& data() const { return data_; }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

/// Rescales a raw odd-dimensioned kernel image to unit sum.
/// Rejects all-zero input and even dimensions.
Psf normalize_psf(const Image& raw);

/// Free parameters of the iterative deconvolution update.
struct DeconvParams {
    double lambda = 0.2;    // weight of the prior-correction term
    double beta = 625.0;    // Gaussian kernel bandwidth, 1/intensity^2
    int window_radius = 4;  // half-width of the square estimation window
    int iterations = 50;
    double epsilon = 1e-8;  // floor for the convolved denominator

    void validate() const;  // throws std::invalid_argument
};

/// Window radius whose square window holds exactly `sample_count` pixels
/// (e.g. 81 -> 4). Throws if no such radius exists.
int window_radius_for_samples(int sample_count);

}  // namespace fluodecon
