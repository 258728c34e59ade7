#include "fluodecon/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <vector>

#include "fluodecon/errors.hpp"

namespace fluodecon {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::string& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) {
        throw IoError(path + ": cannot open for " +
                      (mode[0] == 'r' ? std::string("reading") : std::string("writing")));
    }
    return f;
}

int quantize(double v, int max_value) {
    const double scaled = std::lround(std::clamp(v, 0.0, 1.0) * max_value);
    return static_cast<int>(scaled);
}

// Skips PGM whitespace and '#' comment lines, then reads one unsigned int.
int read_pnm_int(std::FILE* f, const std::string& path) {
    int c = std::fgetc(f);
    for (;;) {
        while (c == ' ' || c == '\t' || c == '\r' || c == '\n') c = std::fgetc(f);
        if (c != '#') break;
        while (c != '\n' && c != EOF) c = std::fgetc(f);
    }
    if (c == EOF || c < '0' || c > '9') {
        throw IoError(path + ": malformed PGM header");
    }
    int value = 0;
    while (c >= '0' && c <= '9') {
        value = value * 10 + (c - '0');
        if (value > 1 << 28) throw IoError(path + ": PGM header value out of range");
        c = std::fgetc(f);
    }
    return value;
}

}  // namespace

Image read_pgm(const std::string& path, double* max_value) {
    FilePtr f = open_file(path, "rb");
    char magic[2] = {0, 0};
    if (std::fread(magic, 1, 2, f.get()) != 2 || magic[0] != 'P' || magic[1] != '5') {
        throw IoError(path + ": not a binary PGM (P5) file");
    }
    const int w = read_pnm_int(f.get(), path);
    const int h = read_pnm_int(f.get(), path);
    const int maxval = read_pnm_int(f.get(), path);
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535) {
        throw IoError(path + ": unsupported PGM geometry or max value");
    }
    const int bytes_per_sample = maxval > 255 ? 2 : 1;
    const std::size_t count = static_cast<std::size_t>(w) * h;
    std::vector<unsigned char> raw(count * bytes_per_sample);
    if (std::fread(raw.data(), 1, raw.size(), f.get()) != raw.size()) {
        throw IoError(path + ": truncated PGM pixel data");
    }
    std::vector<double> data(count);
    const double scale = 1.0 / maxval;
    if (bytes_per_sample == 1) {
        for (std::size_t i = 0; i < count; ++i) data[i] = raw[i] * scale;
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            data[i] = ((raw[2 * i] << 8) | raw[2 * i + 1]) * scale;  // big-endian per spec
        }
    }
    if (max_value != nullptr) *max_value = maxval;
    return Image(w, h, std::move(data));
}

void write_pgm(const std::string& path, const Image& image, int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16) {
        throw std::invalid_argument("write_pgm: bit depth must be 8 or 16");
    }
    const int maxval = (1 << bit_depth) - 1;
    FilePtr f = open_file(path, "wb");
    std::fprintf(f.get(), "P5\n%d %d\n%d\n", image.width(), image.height(), maxval);
    std::vector<unsigned char> raw;
    raw.reserve(image.pixel_count() * (bit_depth / 8));
    for (double v : image.data()) {
        const int q = quantize(v, maxval);
        if (bit_depth == 16) raw.push_back(static_cast<unsigned char>(q >> 8));
        raw.push_back(static_cast<unsigned char>(q & 0xFF));
    }
    if (std::fwrite(raw.data(), 1, raw.size(), f.get()) != raw.size()) {
        throw IoError(path + ": short write");
    }
}

LoadResult read_png(const std::string& path) {
    FilePtr f = open_file(path, "rb");
    unsigned char sig[8];
    if (std::fread(sig, 1, 8, f.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
        throw IoError(path + ": not a PNG file");
    }

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError(path + ": libpng initialization failed");
    }

    // Declared before setjmp; destroyed by normal unwinding after we throw.
    std::vector<std::vector<unsigned char>> rows;
    std::vector<png_bytep> row_ptrs;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError(path + ": PNG decode error");
    }

    png_init_io(png, f.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    png_set_palette_to_rgb(png);
    png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const int depth = png_get_bit_depth(png, info);
    const int channels = png_get_channels(png, info);
    if ((depth != 8 && depth != 16) || (channels != 1 && channels != 3)) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError(path + ": unsupported PNG layout (need 8/16-bit gray or RGB)");
    }

    const std::size_t rowbytes = png_get_rowbytes(png, info);
    rows.assign(h, std::vector<unsigned char>(rowbytes));
    row_ptrs.resize(h);
    for (png_uint_32 y = 0; y < h; ++y) row_ptrs[y] = rows[y].data();
    png_read_image(png, row_ptrs.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    const double maxval = depth == 16 ? 65535.0 : 255.0;
    const double scale = 1.0 / maxval;
    std::vector<std::vector<double>> planes(
        static_cast<std::size_t>(channels),
        std::vector<double>(static_cast<std::size_t>(w) * h));
    for (png_uint_32 y = 0; y < h; ++y) {
        const unsigned char* row = rows[y].data();
        for (png_uint_32 x = 0; x < w; ++x) {
            for (int c = 0; c < channels; ++c) {
                const std::size_t s = (static_cast<std::size_t>(x) * channels + c);
                double v;
                if (depth == 16) {
                    v = ((row[2 * s] << 8) | row[2 * s + 1]) * scale;  // PNG is big-endian
                } else {
                    v = row[s] * scale;
                }
                planes[static_cast<std::size_t>(c)][static_cast<std::size_t>(y) * w + x] = v;
            }
        }
    }

    std::vector<Image> imgs;
    for (auto& plane : planes) {
        imgs.emplace_back(static_cast<int>(w), static_cast<int>(h), std::move(plane));
    }
    std::vector<std::string> names;
    if (channels == 3) names = {"r", "g", "b"};
    return LoadResult{MultiChannelImage(std::move(imgs), std::move(names)), maxval};
}

void write_png(const std::string& path, const MultiChannelImage& image, int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16) {
        throw std::invalid_argument("write_png: bit depth must be 8 or 16");
    }
    const int channels = image.channel_count();
    if (channels != 1 && channels != 3) {
        throw std::invalid_argument("write_png: only 1- or 3-channel images are supported, got " +
                                    std::to_string(channels));
    }
    FilePtr f = open_file(path, "wb");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoError(path + ": libpng initialization failed");
    }

    const int w = image.width();
    const int h = image.height();
    const int maxval = (1 << bit_depth) - 1;
    std::vector<unsigned char> row(static_cast<std::size_t>(w) * channels * (bit_depth / 8));

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError(path + ": PNG encode error");
    }

    png_init_io(png, f.get());
    png_set_compression_level(png, 6);  // fixed level keeps outputs byte-reproducible
    png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), bit_depth,
                 channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    for (int y = 0; y < h; ++y) {
        std::size_t k = 0;
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < channels; ++c) {
                const int q = quantize(image.channel(c).at(x, y), maxval);
                if (bit_depth == 16) row[k++] = static_cast<unsigned char>(q >> 8);
                row[k++] = static_cast<unsigned char>(q & 0xFF);
            }
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

void write_png(const std::string& path, const Image& image, int bit_depth) {
    write_png(path, MultiChannelImage({image}), bit_depth);
}

LoadResult read_image(const std::string& path) {
    {
        FilePtr f = open_file(path, "rb");
        unsigned char sig[8] = {0};
        const std::size_t got = std::fread(sig, 1, 8, f.get());
        if (got >= 2 && sig[0] == 'P' && sig[1] == '5') {
            double maxval = 0.0;
            f.reset();
            Image img = read_pgm(path, &maxval);
            return LoadResult{MultiChannelImage({std::move(img)}), maxval};
        }
        if (got == 8 && png_sig_cmp(sig, 0, 8) == 0) {
            f.reset();
            return read_png(path);
        }
    }
    throw IoError(path + ": unrecognized image format (expected PGM or PNG)");
}

Image read_matrix_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path + ": cannot open for reading");
    std::string first_line;
    if (!std::getline(in, first_line)) throw IoError(path + ": empty file");
    std::istringstream header(first_line);
    int w = 0, h = 0;
    if (!(header >> w >> h) || w <= 0 || h <= 0) {
        throw IoError(path + ":1: expected \"width height\" header");
    }
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(w) * h);
    double v = 0.0;
    while (in >> v) data.push_back(v);
    if (data.size() != static_cast<std::size_t>(w) * h) {
        throw IoError(path + ": expected " + std::to_string(static_cast<std::size_t>(w) * h) +
                      " matrix entries, found " + std::to_string(data.size()));
    }
    try {
        return Image(w, h, std::move(data));
    } catch (const std::invalid_argument& e) {
        throw IoError(path + ": " + e.what());
    }
}

void write_matrix_text(const std::string& path, const Image& image) {
    std::ofstream out(path);
    if (!out) throw IoError(path + ": cannot open for writing");
    out.precision(17);
    out << image.width() << ' ' << image.height() << '\n';
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            out << image.at(x, y) << (x + 1 == image.width() ? '\n' : ' ');
        }
    }
    if (!out) throw IoError(path + ": write failed");
}

Image read_grayscale(const std::string& path) {
    {
        std::ifstream probe(path, std::ios::binary);
        if (!probe) throw IoError(path + ": cannot open for reading");
        unsigned char sig[8] = {0};
        probe.read(reinterpret_cast<char*>(sig), 8);
        const std::streamsize got = probe.gcount();
        if (got >= 2 && sig[0] == 'P' && sig[1] == '5') {
            return read_pgm(path);
        }
        if (got == 8 && png_sig_cmp(sig, 0, 8) == 0) {
            LoadResult r = read_png(path);
            if (r.image.channel_count() != 1) {
                throw IoError(path + ": expected a single-channel image, got " +
                              std::to_string(r.image.channel_count()) + " channels");
            }
            return r.image.channel(0);
        }
    }
    return read_matrix_text(path);
}

}  // namespace fluodecon
