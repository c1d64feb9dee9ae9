#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "destripe/metrics.hpp"
#include "destripe/synth.hpp"
#include "destripe/tv.hpp"
#include "support.hpp"

using namespace destripe;

namespace {

    double out_of_wedge_fraction(const ImageGrid& field, const WedgeSpec& support) {
        return 1.0 - wedge_energy_fraction(field, build_mask(support, field.width(), field.height()));
    }

} // namespace

TEST_CASE("phantoms are deterministic per seed") {
    for (auto kind : {PhantomKind::rectangles, PhantomKind::disks, PhantomKind::interface}) {
        CHECK(make_phantom(kind, 64, 48, 7) == make_phantom(kind, 64, 48, 7));
        const auto phantom = make_phantom(kind, 64, 48, 7);
        for (double v : phantom.pixels()) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
    CHECK_FALSE(make_phantom(PhantomKind::rectangles, 64, 64, 1) == make_phantom(PhantomKind::rectangles, 64, 64, 2));
}

TEST_CASE("interface phantom has two levels split by a vertical line") {
    const auto img = make_phantom(PhantomKind::interface, 40, 30, 1);
    std::set<double> levels(img.pixels().begin(), img.pixels().end());
    CHECK(levels.size() == 2);
    for (std::size_t r = 0; r < 30; ++r) {
        for (std::size_t c = 1; c < 40; ++c) {
            const bool edge = img(r, c) != img(r, c - 1);
            CHECK(edge == (c == 20));
        }
    }
}

TEST_CASE("tilted interface leans counterclockwise") {
    const auto img = make_phantom(PhantomKind::interface, 64, 64, 1, 10.0);
    // top rows cross further left than bottom rows when the line leans CCW from vertical
    auto crossing = [&](std::size_t row) {
        for (std::size_t c = 1; c < 64; ++c)
            if (img(row, c) != img(row, c - 1))
                return c;
        return std::size_t{0};
    };
    CHECK(crossing(2) < crossing(61));
}

TEST_CASE("disks phantom TV regression") {
    const auto img = make_phantom(PhantomKind::disks, 128, 128, 1);
    CHECK(tv_norm(img) == Catch::Approx(192.73968715605818).epsilon(1e-12));
}

TEST_CASE("phantom size precondition") {
    CHECK_THROWS_AS(make_phantom(PhantomKind::disks, 15, 64, 1), InvalidInputError);
}

TEST_CASE("stripe field amplitude and confinement") {
    SECTION("zero amplitude") {
        const auto field = make_stripe_field(StripeSpec{90, 5, 0.0, 1}, 32, 32);
        for (double v : field.pixels())
            CHECK(v == 0.0);
    }
    SECTION("line mode gives uniform columns") {
        const auto f = make_stripe_field(StripeSpec{90, 0, 0.3, 4}, 64, 40);
        for (std::size_t c = 0; c < 64; ++c) {
            double mu = 0.0;
            for (std::size_t r = 0; r < 40; ++r)
                mu += f(r, c);
            mu /= 40.0;
            double var = 0.0;
            for (std::size_t r = 0; r < 40; ++r)
                var += (f(r, c) - mu) * (f(r, c) - mu);
            CHECK(var / 40.0 < 1e-18);
        }
    }
    SECTION("spread 5 stays inside its wedge") {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const StripeSpec spec{90, 5, 0.2, seed};
            const auto f = make_stripe_field(spec, 128, 128);
            CHECK(out_of_wedge_fraction(f, spec.support()) < 1e-9);
        }
    }
    SECTION("any angle and spread stays inside") {
        for (const StripeSpec spec : {StripeSpec{0, 3, 1.0, 2}, StripeSpec{33, 8, 0.1, 3}, StripeSpec{150, 12, 2.0, 4}}) {
            const auto f = make_stripe_field(spec, 96, 80);
            CHECK(out_of_wedge_fraction(f, spec.support()) < 1e-9);
        }
    }
    SECTION("RMS equals amplitude and mean is zero") {
        const auto f = make_stripe_field(StripeSpec{90, 5, 0.25, 9}, 64, 64);
        CHECK(norm(f) / 64.0 == Catch::Approx(0.25).epsilon(1e-12));
        CHECK(mean(f) == Catch::Approx(0.0).margin(1e-12));
    }
}

TEST_CASE("noise model") {
    const ImageGrid flat(512, 512, 0.5);
    SECTION("empirical sigma matches mean / snr") {
        const auto noisy = add_noise(flat, NoiseSpec{10, 3});
        double acc = 0.0;
        const double mu = mean(noisy);
        for (double v : noisy.pixels())
            acc += (v - mu) * (v - mu);
        const double sigma = std::sqrt(acc / static_cast<double>(noisy.size()));
        CHECK(sigma >= 0.0495);
        CHECK(sigma <= 0.0505);
    }
    SECTION("vanishing noise") {
        const auto img = make_phantom(PhantomKind::rectangles, 64, 64, 1);
        const auto noisy = add_noise(img, NoiseSpec{1e12, 1});
        CHECK(testing::max_abs_diff(noisy, img) < 1e-9 * mean(img));
    }
    SECTION("seeding") {
        const ImageGrid small(32, 32, 0.5);
        CHECK(add_noise(small, NoiseSpec{10, 5}) == add_noise(small, NoiseSpec{10, 5}));
        CHECK_FALSE(add_noise(small, NoiseSpec{10, 5}) == add_noise(small, NoiseSpec{10, 6}));
    }
    SECTION("non-positive mean is rejected") {
        CHECK_THROWS_AS(add_noise(ImageGrid(8, 8, 0.0), NoiseSpec{10, 1}), InvalidInputError);
        CHECK_THROWS_AS(add_noise(ImageGrid(8, 8, -1.0), NoiseSpec{10, 1}), InvalidInputError);
        CHECK_THROWS_AS(add_noise(ImageGrid(8, 8, 1.0), NoiseSpec{0, 1}), InvalidInputError);
    }
}

TEST_CASE("corruption is plain addition") {
    const auto clean = make_phantom(PhantomKind::rectangles, 32, 32, 1);
    const auto stripes = make_stripe_field(StripeSpec{90, 5, 0.2, 2}, 32, 32);
    const auto sum = add(clean, stripes);
    for (std::size_t i = 0; i < sum.size(); ++i)
        CHECK(sum.pixels()[i] == clean.pixels()[i] + stripes.pixels()[i]);
}

TEST_CASE("seed derivation separates streams") {
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    CHECK(derive_seed(5, 3) == derive_seed(5, 3));
}

TEST_CASE("phantom kind names") {
    for (auto kind : {PhantomKind::rectangles, PhantomKind::disks, PhantomKind::interface})
        CHECK(parse_phantom_kind(to_string(kind)) == kind);
    CHECK_THROWS_AS(parse_phantom_kind("triangles"), InvalidInputError);
}
