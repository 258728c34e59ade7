#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fluodecon/convolve.hpp"
#include "fluodecon/errors.hpp"
#include "fluodecon/image_io.hpp"
#include "fluodecon/metrics.hpp"
#include "fluodecon/psf_models.hpp"
#include "test_util.hpp"

using namespace fluodecon;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
    return fs::temp_directory_path() / ("fluodecon_psf_test_" + name);
}

}  // namespace

TEST_CASE("bessel_j1 against table values") {
    struct Point {
        double x, j1;
    };
    // reference values from an independent special-function library
    const Point table[] = {
        {0.0, 0.0},
        {0.1, 0.049937526036242},
        {0.5, 0.24226845767487387},
        {1.0, 0.44005058574493355},
        {2.0, 0.5767248077568734},
        {3.0, 0.33905895852593654},
        {3.8317059702075123, 0.0},
        {5.0, -0.3275791375914653},
        {7.0, -0.004682823482345805},
        {10.0, 0.04347274616886141},
        {11.9, -0.22898324966192404},
        {12.1, -0.21574897337692486},
        {13.9, 0.11652489036905626},  // just below the series/asymptotic split
        {14.1, 0.14878435129739373},  // just above
        {20.0, 0.0668331241758502},
        {35.0, 0.043990942179625514},
        {50.0, -0.09751182812517509},
        {100.0, -0.0771453520141123},
    };
    for (const Point& p : table) {
        CHECK(std::abs(bessel_j1(p.x) - p.j1) <= 1e-9);
        CHECK(std::abs(bessel_j1(-p.x) + p.j1) <= 1e-9);  // odd function
    }
}

TEST_CASE("gaussian psf has the closed-form center ratio") {
    PsfModel m;
    m.kind = PsfModel::Kind::Gaussian;
    m.sigma = 1.0;
    m.support_radius = 4;
    const Psf p = render_psf(m);
    // normalization cancels in the ratio: exp(0)/exp(-0.5)
    CHECK(p.at(4, 4) / p.at(5, 4) == doctest::Approx(1.6487212707001282).epsilon(1e-12));
}

TEST_CASE("disk radius zero is the identity kernel") {
    PsfModel m;
    m.kind = PsfModel::Kind::Disk;
    m.disk_radius = 0.0;
    m.support_radius = 0;
    const Psf p = render_psf(m);
    CHECK(p.width() == 1);
    CHECK(p.height() == 1);
    CHECK(p.at(0, 0) == 1.0);
}

TEST_CASE("airy pattern vanishes at its first dark ring") {
    PsfModel m;
    m.kind = PsfModel::Kind::Airy;
    m.first_zero_radius = 3.0;
    m.support_radius = 6;
    const Psf p = render_psf(m);
    const int c = 6;
    CHECK(p.at(c + 3, c) <= 1e-6 * p.at(c, c));
    CHECK(p.at(c - 3, c) <= 1e-6 * p.at(c, c));
    CHECK(p.at(c, c + 3) <= 1e-6 * p.at(c, c));
}

TEST_CASE("isotropic models are 180-degree symmetric") {
    for (PsfModel::Kind kind :
         {PsfModel::Kind::Gaussian, PsfModel::Kind::Airy, PsfModel::Kind::Disk}) {
        PsfModel m;
        m.kind = kind;
        m.sigma = 1.7;
        m.first_zero_radius = 2.5;
        m.disk_radius = 2.0;
        m.support_radius = 5;
        const Psf p = render_psf(m);
        const Psf flipped = flip_psf(p);
        for (std::size_t i = 0; i < p.data().size(); ++i) {
            CHECK(flipped.data()[i] == p.data()[i]);
        }
        double sum = 0.0;
        for (double v : p.data()) sum += v;
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("wider gaussians lower the contrast of a convolved image") {
    PsfModel narrow;
    narrow.sigma = 1.2;
    narrow.support_radius = 6;
    PsfModel wide = narrow;
    wide.sigma = 2.4;

    Rng rng(12);
    std::vector<double> data(48 * 48, 0.05);
    for (int i = 0; i < 6; ++i) {
        const int x = 8 + static_cast<int>(rng.next_u64() % 32);
        const int y = 8 + static_cast<int>(rng.next_u64() % 32);
        data[static_cast<std::size_t>(y) * 48 + x] = 1.0;
    }
    const Image img(48, 48, std::move(data));
    const Rect all{0, 0, 48, 48};
    const double c_narrow = contrast(convolve_fft(img, render_psf(narrow)), all);
    const double c_wide = contrast(convolve_fft(img, render_psf(wide)), all);
    CHECK(c_wide < c_narrow);
}

TEST_CASE("undersized gaussian support produces a warning") {
    PsfModel m;
    m.sigma = 2.0;
    m.support_radius = 4;
    std::string warning;
    render_psf(m, &warning);
    CHECK(!warning.empty());

    warning.clear();
    m.support_radius = 6;  // default 13x13 support holds > 99%
    render_psf(m, &warning);
    CHECK(warning.empty());
}

TEST_CASE("model validation") {
    PsfModel m;
    m.sigma = 0.0;
    CHECK_THROWS_AS(render_psf(m), std::invalid_argument);
    m = PsfModel{};
    m.kind = PsfModel::Kind::Airy;
    m.first_zero_radius = -1.0;
    CHECK_THROWS_AS(render_psf(m), std::invalid_argument);
    m = PsfModel{};
    m.support_radius = -1;
    CHECK_THROWS_AS(render_psf(m), std::invalid_argument);
    CHECK_THROWS_AS(psf_kind_from_name("lorentzian"), std::invalid_argument);
    CHECK(psf_kind_from_name("gaussian") == PsfModel::Kind::Gaussian);
}

TEST_CASE("psf loading from the text exchange format") {
    SUBCASE("inline identity") {
        const fs::path path = temp_file("identity.txt");
        std::ofstream(path) << "1 1\n1.0\n";
        const Psf p = load_psf(path.string());
        CHECK(p.width() == 1);
        CHECK(p.at(0, 0) == 1.0);
        fs::remove(path);
    }
    SUBCASE("rendered kernel round-trips through save/load") {
        PsfModel m;
        m.sigma = 1.5;
        m.support_radius = 4;
        const Psf p = render_psf(m);
        const fs::path path = temp_file("gaussian.txt");
        write_matrix_text(path.string(), Image(p.width(), p.height(), p.data()));
        const Psf loaded = load_psf(path.string());
        CHECK(test::max_abs_diff(Image(p.width(), p.height(), p.data()),
                                 Image(loaded.width(), loaded.height(), loaded.data())) <= 1e-9);
        fs::remove(path);
    }
    SUBCASE("measured bead image loads as a normalized kernel") {
        PsfModel m;
        m.sigma = 1.8;
        m.support_radius = 5;
        const Psf p = render_psf(m);
        // simulate a camera acquisition of the bead: quantized to 16 bits
        const fs::path path = temp_file("bead.pgm");
        write_pgm(path.string(), Image(p.width(), p.height(), p.data()), 16);
        const Psf loaded = load_psf(path.string());
        double sum = 0.0;
        for (double v : loaded.data()) sum += v;
        CHECK(std::abs(sum - 1.0) <= 1e-12);
        CHECK(loaded.width() == p.width());
        fs::remove(path);
    }
    SUBCASE("failure modes") {
        const fs::path path = temp_file("bad.txt");
        std::ofstream(path) << "2 2\n0 0 0 0\n";  // even dims and all-zero
        CHECK_THROWS(load_psf(path.string()));
        fs::remove(path);
        CHECK_THROWS_AS(load_psf("/nonexistent/psf.txt"), IoError);
    }
}
