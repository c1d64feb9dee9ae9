#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "destripe/fft.hpp"
#include "support.hpp"

using namespace destripe;

namespace {

    double max_abs_diff(const Spectrum& s, const std::vector<Complex>& ref) {
        double worst = 0.0;
        for (std::size_t i = 0; i < ref.size(); ++i)
            worst = std::max(worst, std::abs(s.coeffs()[i] - ref[i]));
        return worst;
    }

} // namespace

TEST_CASE("forward transform matches the brute-force DFT") {
    const auto [w, h] = GENERATE(std::pair<std::size_t, std::size_t>{4, 4}, std::pair<std::size_t, std::size_t>{7, 13},
                                 std::pair<std::size_t, std::size_t>{16, 16}, std::pair<std::size_t, std::size_t>{6, 3});
    const auto img = testing::random_image(w, h, 42 + w * h, -1.0, 1.0);
    const auto spec = fft2_forward(img);
    CHECK(max_abs_diff(spec, testing::naive_dft(img)) < 1e-10);
    CHECK(testing::max_abs_diff(fft2_inverse(spec), img) < 1e-10);
}

TEST_CASE("constant image has a DC-only spectrum") {
    const double c = 0.37;
    const auto spec = fft2_forward(ImageGrid(8, 8, c));
    CHECK(std::abs(spec.at(0, 0) - Complex(64 * c, 0.0)) < 1e-10);
    for (std::size_t i = 1; i < spec.coeffs().size(); ++i)
        CHECK(std::abs(spec.coeffs()[i]) < 1e-10);
}

TEST_CASE("impulse at the origin has a flat spectrum") {
    ImageGrid img(5, 6, 0.0);
    img(0, 0) = 1.0;
    const auto spec = fft2_forward(img);
    for (const auto& c : spec.coeffs())
        CHECK(std::abs(c - Complex(1.0, 0.0)) < 1e-12);
}

TEST_CASE("DC-only spectrum inverts to a constant") {
    Spectrum spec(8, 4);
    spec.at(0, 0) = Complex(32 * 2.5, 0.0);
    const auto img = fft2_inverse(spec);
    for (double v : img.pixels())
        CHECK(v == Catch::Approx(2.5).margin(1e-12));
}

TEST_CASE("oracle-built spectrum inverts to the source image") {
    const auto img = testing::random_image(4, 4, 7);
    const auto oracle = testing::naive_dft(img);
    Spectrum spec(4, 4, oracle);
    CHECK(testing::max_abs_diff(fft2_inverse(spec), img) < 1e-10);
}

TEST_CASE("round trip on 16x16") {
    const auto img = testing::random_image(16, 16, 3);
    CHECK(testing::max_abs_diff(fft2_inverse(fft2_forward(img)), img) < 1e-10);
}

TEST_CASE("forward output is Hermitian") {
    const auto spec = fft2_forward(testing::random_image(9, 10, 5));
    CHECK(hermitian_defect(spec) == 0.0);
    for (std::size_t v = 0; v < 10; ++v)
        for (std::size_t u = 0; u < 9; ++u)
            CHECK(std::abs(spec.at(negated_index(u, 9), negated_index(v, 10)) - std::conj(spec.at(u, v))) < 1e-10);
}

TEST_CASE("Parseval") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto img = testing::random_image(12 + seed, 20, seed, -2.0, 3.0);
        double space = 0.0;
        for (double v : img.pixels())
            space += v * v;
        double freq = 0.0;
        const auto spectrum = fft2_forward(img);
        for (const auto& c : spectrum.coeffs())
            freq += std::norm(c);
        freq /= static_cast<double>(img.size());
        CHECK(std::abs(space - freq) / space < 1e-8);
    }
}

TEST_CASE("linearity") {
    const auto x = testing::random_image(10, 8, 11);
    const auto y = testing::random_image(10, 8, 12);
    const double a = 1.7;
    const double b = -0.4;
    ImageGrid combo(10, 8);
    for (std::size_t i = 0; i < combo.size(); ++i)
        combo.pixels()[i] = a * x.pixels()[i] + b * y.pixels()[i];
    const auto fc = fft2_forward(combo);
    const auto fx = fft2_forward(x);
    const auto fy = fft2_forward(y);
    double worst = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < fc.coeffs().size(); ++i) {
        const Complex expect = a * fx.coeffs()[i] + b * fy.coeffs()[i];
        worst = std::max(worst, std::abs(fc.coeffs()[i] - expect));
        scale = std::max(scale, std::abs(expect));
    }
    CHECK(worst / scale < 1e-9);
}

TEST_CASE("transform is bit-deterministic") {
    const auto img = testing::random_image(32, 24, 99);
    const auto a = fft2_forward(img);
    const auto b = fft2_forward(img);
    CHECK(std::equal(a.coeffs().begin(), a.coeffs().end(), b.coeffs().begin()));
}

TEST_CASE("precondition violations") {
    CHECK_THROWS_AS(fft2_forward(ImageGrid(1, 8)), InvalidInputError);
    ImageGrid bad(4, 4, 0.0);
    bad(2, 2) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(fft2_forward(bad), InvalidInputError);

    Spectrum skew(4, 4);
    skew.at(1, 0) = Complex(1.0, 0.0); // partner (3,0) left at zero
    CHECK_THROWS_AS(fft2_inverse(skew), SymmetryError);
}
