#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "destripe/image.hpp"

namespace testing {

    inline destripe::ImageGrid random_image(std::size_t w, std::size_t h, std::uint64_t seed, double lo = 0.0,
                                            double hi = 1.0) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> dist(lo, hi);
        destripe::ImageGrid img(w, h);
        for (double& v : img.pixels())
            v = dist(rng);
        return img;
    }

    // Brute force DFT straight from the definition, C(u,v) = sum x(m,n) exp(-2 pi i (u m / w + v n / h)),
    // with m the column and n the row.
    inline std::vector<std::complex<double>> naive_dft(const destripe::ImageGrid& img, int sign = -1) {
        const std::size_t w = img.width();
        const std::size_t h = img.height();
        std::vector<std::complex<double>> out(w * h);
        for (std::size_t v = 0; v < h; ++v) {
            for (std::size_t u = 0; u < w; ++u) {
                std::complex<double> acc{0.0, 0.0};
                for (std::size_t n = 0; n < h; ++n) {
                    for (std::size_t m = 0; m < w; ++m) {
                        const double phase = sign * 2.0 * std::numbers::pi *
                                             (static_cast<double>(u * m % w) / static_cast<double>(w) +
                                              static_cast<double>(v * n % h) / static_cast<double>(h));
                        acc += img(n, m) * std::polar(1.0, phase);
                    }
                }
                out[v * w + u] = acc;
            }
        }
        return out;
    }

    inline double max_abs_diff(const destripe::ImageGrid& a, const destripe::ImageGrid& b) {
        double worst = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
            worst = std::max(worst, std::abs(a.pixels()[i] - b.pixels()[i]));
        return worst;
    }

} // namespace testing
