#pragma once

#include <string>

#include "fluodecon/image.hpp"

namespace fluodecon {

/// Raster load result: samples divided by the format's max value (so data is
/// in [0, 1]), with that max value reported for manifests and write-back.
struct LoadResult {
    MultiChannelImage image;
    double max_value = 0.0;  // 255 or 65535
};

/// Reads a PGM (binary P5) or PNG file, dispatching on the magic bytes.
LoadResult read_image(const std::string& path);

/// Binary P5 PGM, 8- or 16-bit (big-endian). Values returned in [0, 1].
Image read_pgm(const std::string& path, double* max_value = nullptr);

/// Writes intensities scaled by the format max; values outside [0, 1] clamp.
void write_pgm(const std::string& path, const Image& image, int bit_depth = 16);

/// Grayscale or RGB PNG, 8- or 16-bit. Palette expands to RGB; alpha is
/// stripped. Values returned in [0, 1].
LoadResult read_png(const std::string& path);

void write_png(const std::string& path, const MultiChannelImage& image, int bit_depth = 16);
void write_png(const std::string& path, const Image& image, int bit_depth = 16);

/// Plain-text matrix: first line "width height", then height rows of width
/// whitespace-separated reals. The PSF exchange format.
Image read_matrix_text(const std::string& path);
void write_matrix_text(const std::string& path, const Image& image);

/// Single-channel read for PSF loading: PGM or PNG by magic bytes, anything
/// else parsed as matrix text. Multichannel rasters are rejected.
Image read_grayscale(const std::string& path);

}  // namespace fluodecon
