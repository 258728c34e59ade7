#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fluodecon/deconv.hpp"
#include "fluodecon/errors.hpp"
#include "fluodecon/metrics.hpp"
#include "fluodecon/psf_models.hpp"
#include "fluodecon/simcep.hpp"
#include "test_util.hpp"

using namespace fluodecon;

namespace {

Psf test_psf() {
    PsfModel model;
    model.kind = PsfModel::Kind::Gaussian;
    model.sigma = 1.5;
    model.support_radius = 4;
    return render_psf(model);
}

}  // namespace

TEST_CASE("method names round-trip") {
    CHECK(method_from_name("lr") == Method::LucyRichardson);
    CHECK(method_from_name("map-hunt") == Method::MapHunt);
    CHECK(method_from_name("map-d") == Method::MapD);
    CHECK(method_name(Method::MapD) == "map-d");
    CHECK_THROWS_AS(method_from_name("wiener"), std::invalid_argument);
}

TEST_CASE("lr_step leaves exact data at its fixed point") {
    Rng rng(31);
    const Psf psf = test_psf();
    const Image truth = test::random_image(rng, 24, 24, 0.1, 1.0);
    const Image measured = convolve_fft(truth, psf);
    const Image next = lr_step(truth, measured, psf, 1e-8);
    CHECK(test::max_abs_diff(next, truth) <= 1e-9);
}

TEST_CASE("lr_step keeps constants constant") {
    const Image c = Image::constant(16, 16, 0.42);
    const Image next = lr_step(c, c, test_psf(), 1e-8);
    CHECK(test::max_abs_diff(next, c) <= 1e-12);
}

TEST_CASE("lr iterations sharpen a blurred point monotonically") {
    std::vector<double> data(16 * 16, 0.0);
    data[8 * 16 + 8] = 1.0;
    const Psf psf = test_psf();
    const Image measured = convolve_fft(Image(16, 16, std::move(data)), psf);

    Image iterate = measured;
    double prev_peak = iterate.max();
    for (int j = 0; j < 25; ++j) {
        iterate = lr_step(iterate, measured, psf, 1e-8);
        const double peak = iterate.max();
        CHECK(peak > prev_peak);
        prev_peak = peak;
    }
}

TEST_CASE("mapd_step reductions") {
    Rng rng(32);
    const Psf psf = test_psf();
    const Image measured = test::random_image(rng, 20, 20, 0.05, 1.0);
    const Image iterate = test::random_image(rng, 20, 20, 0.05, 1.0);

    SUBCASE("lambda = 0 equals lr_step bit-exactly") {
        DeconvParams p;
        p.lambda = 0.0;
        CHECK(test::bit_identical(mapd_step(iterate, measured, psf, p),
                                  lr_step(iterate, measured, psf, p.epsilon)));
    }
    SUBCASE("window radius 0 equals lr_step bit-exactly") {
        DeconvParams p;
        p.lambda = 0.2;
        p.window_radius = 0;
        CHECK(test::bit_identical(mapd_step(iterate, measured, psf, p),
                                  lr_step(iterate, measured, psf, p.epsilon)));
    }
    SUBCASE("constant images stay constant") {
        const Image c = Image::constant(20, 20, 0.3);
        DeconvParams p;
        const Image next = mapd_step(c, c, psf, p);
        CHECK(test::max_abs_diff(next, c) <= 1e-12);
    }
}

TEST_CASE("maphunt_step") {
    Rng rng(33);
    const Psf psf = test_psf();
    const Image measured = test::random_image(rng, 20, 20, 0.05, 1.0);
    const Image iterate = test::random_image(rng, 20, 20, 0.05, 1.0);

    SUBCASE("lambda = 0 equals lr_step bit-exactly") {
        CHECK(test::bit_identical(maphunt_step(iterate, measured, psf, 0.0, 1e-8),
                                  lr_step(iterate, measured, psf, 1e-8)));
    }
    SUBCASE("constant fixed point") {
        const Image c = Image::constant(20, 20, 0.5);
        CHECK(test::max_abs_diff(maphunt_step(c, c, psf, 0.2, 1e-8), c) <= 1e-12);
    }
    SUBCASE("hand-computed identity-kernel pixel") {
        // iterate all 0.5, measured center 1.0: LR factor doubles the center,
        // the relaxation adds 0.2 * 0.5 * 0.5 = 0.05 -> 1.05.
        const Psf identity(1, 1, {1.0});
        std::vector<double> g(9, 0.5);
        g[4] = 1.0;
        const Image measured3(3, 3, std::move(g));
        const Image iterate3 = Image::constant(3, 3, 0.5);
        const Image next = maphunt_step(iterate3, measured3, identity, 0.2, 1e-8);
        CHECK(next.at(1, 1) == doctest::Approx(1.05).epsilon(1e-9));
        CHECK(next.at(0, 0) == doctest::Approx(0.5).epsilon(1e-9));
    }
}

TEST_CASE("deconvolve composes steps and records a trace") {
    Rng rng(34);
    const Psf psf = test_psf();
    const Image measured = test::random_image(rng, 18, 18, 0.05, 1.0);

    SUBCASE("one lr iteration is one lr_step") {
        DeconvParams p;
        p.lambda = 0.0;
        p.iterations = 1;
        const DeconvResult res = deconvolve(measured, psf, Method::LucyRichardson, p);
        CHECK(test::bit_identical(res.image, lr_step(measured, measured, psf, p.epsilon)));
        CHECK(res.trace.records.size() == 1);
    }
    SUBCASE("trace has one record per iteration with finite stats") {
        DeconvParams p;
        p.iterations = 7;
        const DeconvResult res = deconvolve(measured, psf, Method::MapD, p);
        REQUIRE(res.trace.records.size() == 7);
        for (std::size_t i = 0; i < res.trace.records.size(); ++i) {
            CHECK(res.trace.records[i].iteration == static_cast<int>(i) + 1);
            CHECK(res.trace.records[i].min_intensity >= 0.0);
            CHECK(std::isfinite(res.trace.records[i].mean_abs_update));
            CHECK(!res.trace.records[i].has_psnr);
        }
    }
    SUBCASE("ground truth enables the psnr column") {
        DeconvParams p;
        p.iterations = 3;
        const Image truth = test::random_image(rng, 18, 18, 0.1, 1.0);
        const DeconvResult res = deconvolve(measured, psf, Method::LucyRichardson, p, &truth);
        for (const auto& rec : res.trace.records) CHECK(rec.has_psnr);

        std::ostringstream os;
        res.trace.write_csv(os);
        CHECK(os.str().rfind("iter,mean_abs_update,min,max,psnr\n", 0) == 0);
    }
    SUBCASE("dimension mismatch is rejected") {
        const Image truth = Image::zeros(4, 4);
        DeconvParams p;
        CHECK_THROWS_AS(deconvolve(measured, psf, Method::LucyRichardson, p, &truth),
                        std::invalid_argument);
    }
}

TEST_CASE("reduction chain is bit-exact per step") {
    PhantomConfig config;
    config.width = 48;
    config.height = 48;
    config.cell_count = 3;
    config.cell_radius_min = 6.0;
    config.cell_radius_max = 9.0;
    config.seed = 404;
    const Psf psf = test_psf();
    const Image measured = make_pair(config, psf).degraded.channel(0);

    DeconvParams zero_lambda;
    zero_lambda.lambda = 0.0;
    DeconvParams zero_radius;
    zero_radius.window_radius = 0;

    Image lr = measured;
    Image mapd_l0 = measured;
    Image hunt_l0 = measured;
    Image mapd_r0 = measured;
    for (int j = 0; j < 5; ++j) {
        lr = lr_step(lr, measured, psf, 1e-8);
        mapd_l0 = mapd_step(mapd_l0, measured, psf, zero_lambda);
        hunt_l0 = maphunt_step(hunt_l0, measured, psf, 0.0, 1e-8);
        mapd_r0 = mapd_step(mapd_r0, measured, psf, zero_radius);
        CHECK(test::bit_identical(mapd_l0, lr));
        CHECK(test::bit_identical(hunt_l0, lr));
        CHECK(test::bit_identical(mapd_r0, lr));
    }
}

TEST_CASE("one step of any method preserves exact constant data") {
    const Psf psf = test_psf();
    const Image f = Image::constant(32, 32, 0.6);
    const Image g = convolve_fft(f, psf);  // constant under Reflect
    DeconvParams p;
    CHECK(test::max_abs_diff(lr_step(f, g, psf, p.epsilon), f) < 1e-9);
    CHECK(test::max_abs_diff(mapd_step(f, g, psf, p), f) < 1e-9);
    CHECK(test::max_abs_diff(maphunt_step(f, g, psf, p.lambda, p.epsilon), f) < 1e-9);
}

TEST_CASE("deconvolution is deterministic and thread-count independent") {
    PhantomConfig config;
    config.width = 40;
    config.height = 40;
    config.cell_count = 2;
    config.cell_radius_min = 6.0;
    config.cell_radius_max = 9.0;
    config.seed = 11;
    const Psf psf = test_psf();
    const Image measured = make_pair(config, psf).degraded.channel(0);

    DeconvParams p;
    p.iterations = 6;
    const DeconvResult a = deconvolve(measured, psf, Method::MapD, p, nullptr, 1);
    const DeconvResult b = deconvolve(measured, psf, Method::MapD, p, nullptr, 1);
    const DeconvResult c = deconvolve(measured, psf, Method::MapD, p, nullptr, 3);
    CHECK(test::bit_identical(a.image, b.image));
    CHECK(test::bit_identical(a.image, c.image));
    for (std::size_t i = 0; i < a.trace.records.size(); ++i) {
        CHECK(a.trace.records[i].mean_abs_update == b.trace.records[i].mean_abs_update);
        CHECK(a.trace.records[i].mean_abs_update == c.trace.records[i].mean_abs_update);
    }
}

TEST_CASE("lr keeps total flux nearly constant for interior objects") {
    // centered blob, support well away from the borders
    const int n = 48;
    std::vector<double> data(static_cast<std::size_t>(n) * n, 0.0);
    for (int y = 16; y < 32; ++y) {
        for (int x = 16; x < 32; ++x) {
            const double dx = x - 23.5, dy = y - 23.5;
            data[static_cast<std::size_t>(y) * n + x] = std::exp(-(dx * dx + dy * dy) / 18.0);
        }
    }
    const Psf psf = test_psf();
    const Image measured = convolve_fft(Image(n, n, std::move(data)), psf);

    Image iterate = measured;
    for (int j = 0; j < 10; ++j) {
        const double before = iterate.sum();
        iterate = lr_step(iterate, measured, psf, 1e-8);
        CHECK(std::abs(iterate.sum() - before) < 0.005 * before);
    }
}

TEST_CASE("lr improves psnr on a mildly noisy phantom") {
    PhantomConfig config;
    config.width = 64;
    config.height = 64;
    config.cell_count = 3;
    config.cell_radius_min = 7.0;
    config.cell_radius_max = 10.0;
    config.photon_scale = 5000.0;  // mild noise: deconvolution gain dominates
    config.ccd_variance = 1e-5;
    config.autofluorescence = 0.01;
    config.seed = 5150;
    const Psf psf = test_psf();
    const PhantomPair pair = make_pair(config, psf);

    DeconvParams p;
    p.iterations = 50;
    const Image out =
        deconvolve(pair.degraded.channel(2), psf, Method::LucyRichardson, p).image;
    CHECK(psnr(out, pair.ground_truth.channel(2)) >
          psnr(pair.degraded.channel(2), pair.ground_truth.channel(2)));
}

TEST_CASE("divergent runs raise NumericalError with the iteration index") {
    Rng rng(35);
    const Psf psf = test_psf();
    const Image measured = test::random_image(rng, 16, 16, 0.05, 1.0);
    DeconvParams p;
    p.lambda = 1e150;  // blows up the relaxation term
    p.iterations = 10;
    CHECK_THROWS_AS(deconvolve(measured, psf, Method::MapHunt, p), NumericalError);
    try {
        deconvolve(measured, psf, Method::MapHunt, p);
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("iteration") != std::string::npos);
    }
}

TEST_CASE("multichannel deconvolution treats channels independently") {
    PhantomConfig config;
    config.width = 32;
    config.height = 32;
    config.cell_count = 2;
    config.cell_radius_min = 5.0;
    config.cell_radius_max = 7.0;
    config.seed = 3;
    const Psf psf = test_psf();
    const Image ch = make_pair(config, psf).degraded.channel(0);

    DeconvParams p;
    p.iterations = 4;
    const MultiChannelImage dup({ch, ch, ch});
    const MultiChannelImage out = deconvolve_multichannel(dup, psf, Method::MapD, p);
    CHECK(test::bit_identical(out.channel(0), out.channel(1)));
    CHECK(test::bit_identical(out.channel(0), out.channel(2)));
    CHECK(test::bit_identical(out.channel(0), deconvolve(ch, psf, Method::MapD, p).image));
}
