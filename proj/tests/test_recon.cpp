#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "destripe/metrics.hpp"
#include "destripe/recon.hpp"
#include "destripe/synth.hpp"
#include "support.hpp"

using namespace destripe;

namespace {

    struct Case {
        ImageGrid clean;
        ImageGrid stripes;
        ImageGrid observed;
    };

    Case striped_rectangles(std::uint64_t seed, std::size_t side = 128) {
        const auto clean = make_phantom(PhantomKind::rectangles, side, side, derive_seed(seed, 0));
        const auto stripes = make_stripe_field(StripeSpec{90, 5, 0.2, derive_seed(seed, 1)}, side, side);
        return {clean, stripes, add(clean, stripes)};
    }

    double pixel_std(const ImageGrid& img) {
        const double mu = mean(img);
        double acc = 0.0;
        for (double v : img.pixels())
            acc += (v - mu) * (v - mu);
        return std::sqrt(acc / static_cast<double>(img.size()));
    }

} // namespace

TEST_CASE("projection fixes the measured image and is idempotent") {
    const auto b = testing::random_image(24, 20, 3);
    const auto mask = build_mask(WedgeSpec{90, 10, 0}, 24, 20);
    const auto measured = apply_mask(fft2_forward(b), mask);

    CHECK(testing::max_abs_diff(project_data_constraint(b, measured, mask), b) < 1e-9);

    const auto x = testing::random_image(24, 20, 4);
    const auto once = project_data_constraint(x, measured, mask);
    CHECK(testing::max_abs_diff(project_data_constraint(once, measured, mask), once) < 1e-9);
}

TEST_CASE("zero image with all-pass mask projects onto the data") {
    const auto b = testing::random_image(8, 8, 21);
    const WedgeMask all(8, 8, true);
    const Spectrum measured(8, 8, testing::naive_dft(b));
    CHECK(testing::max_abs_diff(project_data_constraint(ImageGrid(8, 8, 0.0), measured, all), b) < 1e-10);
}

TEST_CASE("projection shape checks") {
    const auto mask = build_mask(WedgeSpec{}, 8, 8);
    CHECK_THROWS_AS(project_data_constraint(ImageGrid(8, 6), fft2_forward(ImageGrid(8, 8)), mask), ShapeError);
    CHECK_THROWS_AS(project_data_constraint(ImageGrid(8, 8), fft2_forward(ImageGrid(6, 8)), mask), ShapeError);
}

TEST_CASE("empty wedge returns the observed image") {
    const auto obs = testing::random_image(32, 32, 9);
    ReconParams p;
    p.iterations = 10;
    const auto out = reconstruct(obs, WedgeSpec{90, 0, 0}, p);
    CHECK(testing::max_abs_diff(out.image, obs) < 1e-8);
}

TEST_CASE("stripe phantom reconstruction beats wedge deletion") {
    const auto c = striped_rectangles(1);
    const auto mask = build_mask(WedgeSpec{90, 8, 0}, 128, 128);
    const auto result = reconstruct(c.observed, mask);
    const auto baseline = wedge_deleted(c.observed, mask);
    const double score = normalized_rmse(c.clean, result.image, baseline);
    CHECK(score < 1.0);
    CHECK(score < 0.5);

    SECTION("hard data constraint") {
        const auto out_spec = fft2_forward(result.image);
        const auto obs_spec = fft2_forward(c.observed);
        double worst = 0.0;
        double scale = 0.0;
        for (std::size_t i = 0; i < out_spec.coeffs().size(); ++i) {
            if (!mask.keep_at(i))
                continue;
            worst = std::max(worst, std::abs(out_spec.coeffs()[i] - obs_spec.coeffs()[i]));
            scale = std::max(scale, std::abs(obs_spec.coeffs()[i]));
        }
        CHECK(worst / scale < 1e-6);
    }
    SECTION("TV drops below the wedge-deleted image") {
        CHECK(tv_norm(result.image) < tv_norm(baseline));
    }
    SECTION("residual lives in the wedge") {
        const auto r = residual(result.image, c.observed);
        // signed difference carries the spectral content; |.| is for display
        ImageGrid signed_diff(128, 128);
        for (std::size_t i = 0; i < r.size(); ++i)
            signed_diff.pixels()[i] = result.image.pixels()[i] - c.observed.pixels()[i];
        CHECK(wedge_energy_fraction(signed_diff, mask) >= 0.9);
    }
    SECTION("trace") {
        const auto& it = result.trace.iterations;
        REQUIRE(it.size() == 150);
        for (const auto& rec : it) {
            CHECK(std::isfinite(rec.tv_value));
            CHECK(rec.tv_value >= 0.0);
            CHECK(rec.tv_value <= rec.tv_before);
        }
        CHECK(it.back().rel_change < 1e-4);
        CHECK(it.front().dp == Catch::Approx(distance(c.observed, baseline)).epsilon(1e-9));
    }
}

TEST_CASE("wedge-confined stripes are not restored") {
    const double amplitude = 0.2;
    const auto stripes = make_stripe_field(StripeSpec{90, 5, amplitude, 17}, 128, 128);
    const auto out = reconstruct(stripes, WedgeSpec{90, 8, 0});
    CHECK(pixel_std(out.image) < 0.05 * amplitude);
}

TEST_CASE("reconstruction is deterministic") {
    const auto c = striped_rectangles(2, 48);
    ReconParams p;
    p.iterations = 20;
    const auto a = reconstruct(c.observed, WedgeSpec{90, 8, 0}, p);
    const auto b = reconstruct(c.observed, WedgeSpec{90, 8, 0}, p);
    CHECK(a.image == b.image);
    std::ostringstream ta;
    std::ostringstream tb;
    write_trace_csv(ta, a.trace);
    write_trace_csv(tb, b.trace);
    CHECK(ta.str() == tb.str());
}

TEST_CASE("early stop and positivity") {
    const auto c = striped_rectangles(3, 48);
    ReconParams p;
    p.stop_rel_change = 1e-2;
    const auto early = reconstruct(c.observed, WedgeSpec{90, 8, 0}, p);
    CHECK(early.trace.iterations.size() < 150);
    CHECK(early.trace.iterations.back().rel_change < 1e-2);

    ReconParams pos;
    pos.iterations = 5;
    pos.positivity = true;
    CHECK_NOTHROW(reconstruct(c.observed, WedgeSpec{90, 8, 0}, pos));
}

TEST_CASE("trace CSV layout") {
    const auto c = striped_rectangles(4, 32);
    ReconParams p;
    p.iterations = 3;
    std::ostringstream os;
    write_trace_csv(os, reconstruct(c.observed, WedgeSpec{90, 8, 0}, p).trace);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "iteration,tv_value,dp,dtvg,rel_change,tv_before");
    int rows = 0;
    while (std::getline(in, line))
        ++rows;
    CHECK(rows == 3);
}

TEST_CASE("overflowing input diverges with the iteration index") {
    auto big = testing::random_image(16, 16, 5, -1e155, 1e155);
    try {
        (void)reconstruct(big, WedgeSpec{90, 8, 0});
        FAIL("expected divergence");
    } catch (const DivergenceError& e) {
        CHECK(e.iteration() == 1);
    }
}

TEST_CASE("residual examples") {
    const auto x = testing::random_image(5, 5, 1);
    const auto self = residual(x, x);
    for (double v : self.pixels())
        CHECK(v == 0.0);
    const ImageGrid a(2, 1, std::vector<double>{1, 2});
    const ImageGrid b(2, 1, std::vector<double>{0, 5});
    CHECK(residual(a, b) == ImageGrid(2, 1, std::vector<double>{1, 3}));
    CHECK_THROWS_AS(residual(a, ImageGrid(1, 2)), ShapeError);
}

TEST_CASE("parameter validation") {
    const ImageGrid img(16, 16, 1.0);
    ReconParams p;
    p.alpha = 0.0;
    CHECK_THROWS_AS(reconstruct(img, WedgeSpec{}, p), InvalidInputError);
    p = {};
    p.alpha = 1.5;
    CHECK_THROWS_AS(reconstruct(img, WedgeSpec{}, p), InvalidInputError);
    p = {};
    p.iterations = 0;
    CHECK_THROWS_AS(reconstruct(img, WedgeSpec{}, p), InvalidInputError);
    p = {};
    p.tv_steps = 0;
    CHECK_THROWS_AS(reconstruct(img, WedgeSpec{}, p), InvalidInputError);
    CHECK_THROWS_AS(reconstruct(img, build_mask(WedgeSpec{}, 8, 8)), ShapeError);
}
