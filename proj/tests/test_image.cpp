#include <doctest.h>

#include <stdexcept>

#include "fluodecon/image.hpp"
#include "test_util.hpp"

using namespace fluodecon;

TEST_CASE("image construction validates shape and intensities") {
    const Image img(2, 2, {0.0, 1.0, 2.0, 3.0});
    CHECK(img.width() == 2);
    CHECK(img.height() == 2);
    CHECK(img.at(1, 1) == 3.0);

    CHECK_THROWS_AS(Image(2, 2, {0.0, 1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(Image(1, 1, {-0.5}), std::invalid_argument);
    CHECK_THROWS_AS(Image(1, 1, {std::numeric_limits<double>::quiet_NaN()}), std::invalid_argument);
    CHECK_THROWS_AS(Image(1, 1, {std::numeric_limits<double>::infinity()}), std::invalid_argument);
    CHECK_THROWS_AS(Image(0, 2, {}), std::invalid_argument);
}

TEST_CASE("image data round-trips bit-exactly") {
    Rng rng(99);
    const Image img = test::random_image(rng, 17, 9);
    const Image copy(img.width(), img.height(), img.data());
    CHECK(test::bit_identical(img, copy));
}

TEST_CASE("multichannel image checks channel consistency") {
    const Image a = Image::zeros(4, 3);
    const Image b = Image::constant(4, 3, 0.5);
    const MultiChannelImage mc({a, b});
    CHECK(mc.channel_count() == 2);
    CHECK(mc.channel_name(0) == "ch0");
    CHECK(mc.channel_name(1) == "ch1");

    CHECK_THROWS_AS(MultiChannelImage({}), std::invalid_argument);
    CHECK_THROWS_AS(MultiChannelImage({a, Image::zeros(3, 4)}), std::invalid_argument);
    CHECK_THROWS_AS(MultiChannelImage({a}, {"x", "y"}), std::invalid_argument);
}

TEST_CASE("normalize_psf rescales to unit sum") {
    SUBCASE("single entry") {
        const Psf p = normalize_psf(Image(1, 1, {5.0}));
        CHECK(p.at(0, 0) == 1.0);
    }
    SUBCASE("uniform 3x3") {
        const Psf p = normalize_psf(Image::constant(3, 3, 1.0));
        for (double v : p.data()) CHECK(v == doctest::Approx(1.0 / 9.0).epsilon(1e-14));
    }
    SUBCASE("hand-computed cross kernel, sum 8") {
        const Psf p = normalize_psf(Image(3, 3, {0, 1, 0, 1, 4, 1, 0, 1, 0}));
        CHECK(p.at(1, 1) == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(p.at(0, 1) == doctest::Approx(0.125).epsilon(1e-14));
        CHECK(p.at(1, 0) == doctest::Approx(0.125).epsilon(1e-14));
        CHECK(p.at(0, 0) == 0.0);
    }
    SUBCASE("rejects all-zero and even dimensions") {
        CHECK_THROWS_AS(normalize_psf(Image::zeros(3, 3)), std::invalid_argument);
        CHECK_THROWS_AS(normalize_psf(Image::constant(2, 3, 1.0)), std::invalid_argument);
        CHECK_THROWS_AS(normalize_psf(Image::constant(3, 4, 1.0)), std::invalid_argument);
    }
}

TEST_CASE("normalized psfs sum to one and normalization is idempotent") {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const Psf p = test::random_psf(rng, 2 * (trial % 5) + 1, 2 * (trial % 7) + 1);
        double sum = 0.0;
        for (double v : p.data()) sum += v;
        CHECK(std::abs(sum - 1.0) <= 1e-12);

        const Psf again = normalize_psf(Image(p.width(), p.height(), p.data()));
        for (std::size_t i = 0; i < p.data().size(); ++i) {
            CHECK(std::abs(again.data()[i] - p.data()[i]) <= 1e-12);
        }
    }
}

TEST_CASE("psf constructor enforces its invariants") {
    CHECK_THROWS_AS(Psf(3, 3, {0.5, 0, 0, 0, 0, 0, 0, 0, 0}), std::invalid_argument);  // sum != 1
    CHECK_THROWS_AS(Psf(2, 1, {0.5, 0.5}), std::invalid_argument);                     // even
    CHECK_THROWS_AS(Psf(1, 1, {-1.0}), std::invalid_argument);
    const Psf ok(1, 1, {1.0});
    CHECK(ok.radius_x() == 0);
}

TEST_CASE("deconv params validation") {
    DeconvParams p;
    CHECK_NOTHROW(p.validate());
    p.iterations = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = DeconvParams{};
    p.epsilon = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = DeconvParams{};
    p.lambda = -0.1;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = DeconvParams{};
    p.beta = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = DeconvParams{};
    p.window_radius = -1;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("window radius from sample count") {
    CHECK(window_radius_for_samples(81) == 4);  // the 9x9 default
    CHECK(window_radius_for_samples(1) == 0);
    CHECK(window_radius_for_samples(9) == 1);
    CHECK_THROWS_AS(window_radius_for_samples(80), std::invalid_argument);
    CHECK_THROWS_AS(window_radius_for_samples(16), std::invalid_argument);
    CHECK_THROWS_AS(window_radius_for_samples(0), std::invalid_argument);
}
