#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fluodecon/expectation.hpp"
#include "fast_exp.hpp"
#include "test_util.hpp"

using namespace fluodecon;

TEST_CASE("kernel_weight evaluates the Gaussian similarity kernel") {
    CHECK(kernel_weight(0.42, 0.42, 1234.5) == 1.0);
    CHECK(kernel_weight(1.0, 0.0, 0.0) == 1.0);
    // exp(-625 * 0.04^2) = exp(-1)
    CHECK(kernel_weight(0.06, 0.02, 625.0) == doctest::Approx(0.36787944117144233).epsilon(1e-12));
    CHECK(kernel_weight(0.0, 1.0, 10.0) > 0.0);
    CHECK(kernel_weight(0.0, 1.0, 10.0) <= 1.0);
}

TEST_CASE("batched exp agrees with std::exp") {
    Rng rng(21);
    std::vector<double> x(4096), got(4096);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = -rng.uniform(0.0, 700.0);
    x[0] = 0.0;
    x[1] = -0.0;
    x[2] = -1.0;
    x[3] = -708.0;
    detail::exp_batch_nonpositive(x.data(), got.data(), static_cast<int>(x.size()));
    CHECK(got[0] == 1.0);
    CHECK(got[1] == 1.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double ref = std::exp(x[i]);
        CHECK(std::abs(got[i] - ref) <= 4e-16 * ref);
    }
    // deep underflow clamps to an effectively-zero weight
    const double deep = -1e9;
    double w = 1.0;
    detail::exp_batch_nonpositive(&deep, &w, 1);
    CHECK(w >= 0.0);
    CHECK(w < 1e-300);
}

TEST_CASE("expectation of a constant image is the constant") {
    const Image img = Image::constant(12, 9, 0.73);
    const Image out = expectation_map(img, KernelConfig{625.0, 3});
    for (double v : out.data()) CHECK(std::abs(v - 0.73) <= 1e-12);
}

TEST_CASE("window radius zero is the bit-exact identity") {
    Rng rng(22);
    const Image img = test::random_image(rng, 15, 11);
    CHECK(test::bit_identical(expectation_map(img, KernelConfig{625.0, 0}), img));
    CHECK(test::bit_identical(expectation_map_reference(img, KernelConfig{625.0, 0}), img));
}

TEST_CASE("beta zero reduces to the windowed arithmetic mean") {
    Rng rng(23);
    const Image img = test::random_image(rng, 13, 17);
    const int radius = 2;
    const Image out = expectation_map(img, KernelConfig{0.0, radius});
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            double sum = 0.0;
            int n = 0;
            for (int wy = std::max(0, y - radius); wy < std::min(img.height(), y + radius + 1); ++wy) {
                for (int wx = std::max(0, x - radius); wx < std::min(img.width(), x + radius + 1); ++wx) {
                    sum += img.at(wx, wy);
                    ++n;
                }
            }
            CHECK(std::abs(out.at(x, y) - sum / n) <= 1e-12);
        }
    }
    // 3x3 single bright center, radius 1, beta 0: plain mean 1/9 at the center
    const Image spike(3, 3, {0, 0, 0, 0, 1, 0, 0, 0, 0});
    const Image m = expectation_map(spike, KernelConfig{0.0, 1});
    CHECK(m.at(1, 1) == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("expectation_map matches the brute-force reference") {
    Rng rng(24);
    for (int trial = 0; trial < 10; ++trial) {
        const int w = 8 + static_cast<int>(rng.next_u64() % 25);
        const int h = 8 + static_cast<int>(rng.next_u64() % 25);
        const KernelConfig config{rng.uniform(0.0, 1000.0), static_cast<int>(rng.next_u64() % 5)};
        const Image img = test::random_image(rng, w, h);
        const Image fast = expectation_map(img, config);
        const Image ref = expectation_map_reference(img, config);
        CHECK(test::max_abs_diff(fast, ref) <= 1e-12);
    }
}

TEST_CASE("output is a convex combination of window values") {
    Rng rng(25);
    const Image img = test::random_image(rng, 21, 14);
    const int radius = 3;
    const Image out = expectation_map(img, KernelConfig{250.0, radius});
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            double lo = 1e300, hi = -1e300;
            for (int wy = std::max(0, y - radius); wy < std::min(img.height(), y + radius + 1); ++wy) {
                for (int wx = std::max(0, x - radius); wx < std::min(img.width(), x + radius + 1); ++wx) {
                    lo = std::min(lo, img.at(wx, wy));
                    hi = std::max(hi, img.at(wx, wy));
                }
            }
            CHECK(out.at(x, y) >= lo - 1e-15);
            CHECK(out.at(x, y) <= hi + 1e-15);
        }
    }
}

TEST_CASE("huge beta makes the self-weight dominate") {
    // all-distinct values with gaps >= 1e-3: cross weights are exp(-1e12 * 1e-6) ~ 0
    const int w = 16, h = 16;
    std::vector<double> data(static_cast<std::size_t>(w) * h);
    Rng rng(26);
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = static_cast<double>(i) * 1e-3;
    for (std::size_t i = data.size(); i > 1; --i) {
        std::swap(data[i - 1], data[rng.next_u64() % i]);
    }
    const Image img(w, h, std::move(data));
    const Image out = expectation_map(img, KernelConfig{1e12, 4});
    CHECK(test::max_abs_diff(out, img) <= 1e-6);
}

TEST_CASE("two-level step images pass through nearly unchanged") {
    const int w = 32, h = 32;
    std::vector<double> data(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            data[static_cast<std::size_t>(y) * w + x] = (x < w / 2) ? 0.0 : 0.5;
        }
    }
    const Image img(w, h, std::move(data));
    const Image out = expectation_map(img, KernelConfig{625.0, 4});
    CHECK(test::max_abs_diff(out, img) < 0.01);
}

TEST_CASE("estimator is equivariant under transpose and flips") {
    Rng rng(27);
    const int w = 19, h = 12;
    const Image img = test::random_image(rng, w, h);
    const KernelConfig config{300.0, 2};
    const Image out = expectation_map(img, config);

    auto transpose = [](const Image& in) {
        std::vector<double> t(in.pixel_count());
        for (int y = 0; y < in.height(); ++y) {
            for (int x = 0; x < in.width(); ++x) {
                t[static_cast<std::size_t>(x) * in.height() + y] = in.at(x, y);
            }
        }
        return Image(in.height(), in.width(), std::move(t));
    };
    auto hflip = [](const Image& in) {
        std::vector<double> f(in.pixel_count());
        for (int y = 0; y < in.height(); ++y) {
            for (int x = 0; x < in.width(); ++x) {
                f[static_cast<std::size_t>(y) * in.width() + (in.width() - 1 - x)] = in.at(x, y);
            }
        }
        return Image(in.width(), in.height(), std::move(f));
    };

    // the window multiset is identical; only FP summation order differs
    CHECK(test::max_abs_diff(expectation_map(transpose(img), config), transpose(out)) <= 5e-14);
    CHECK(test::max_abs_diff(expectation_map(hflip(img), config), hflip(out)) <= 5e-14);
}

TEST_CASE("results do not depend on the thread count") {
    Rng rng(28);
    const Image img = test::random_image(rng, 40, 33);
    const KernelConfig config{625.0, 4};
    const Image t1 = expectation_map(img, config, 1);
    const Image t4 = expectation_map(img, config, 4);
    const Image t7 = expectation_map(img, config, 7);
    CHECK(test::bit_identical(t1, t4));
    CHECK(test::bit_identical(t1, t7));
}

TEST_CASE("kernel config validation") {
    CHECK_THROWS_AS(expectation_map(Image::zeros(4, 4), KernelConfig{-1.0, 1}),
                    std::invalid_argument);
    CHECK_THROWS_AS(expectation_map(Image::zeros(4, 4), KernelConfig{1.0, -1}),
                    std::invalid_argument);
}
