#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <string_view>

#include "destripe/errors.hpp"
#include "destripe/fft.hpp"
#include "destripe/image.hpp"
#include "destripe/wedge.hpp"

namespace destripe {

    enum class PhantomKind { rectangles, disks, interface };

    [[nodiscard]] inline std::string_view to_string(PhantomKind kind) noexcept {
        switch (kind) {
        case PhantomKind::rectangles: return "rectangles";
        case PhantomKind::disks: return "disks";
        case PhantomKind::interface: return "interface";
        }
        return "unknown";
    }

    [[nodiscard]] inline PhantomKind parse_phantom_kind(std::string_view name) {
        if (name == "rectangles")
            return PhantomKind::rectangles;
        if (name == "disks")
            return PhantomKind::disks;
        if (name == "interface")
            return PhantomKind::interface;
        throw InvalidInputError("unknown phantom kind '" + std::string(name) + "'");
    }

    /// Stripe field whose spectrum lies inside the wedge of full width
    /// `spread_deg` around the direction `angle_deg` (same convention as
    /// WedgeSpec). A spread of 0 gives perfectly unidirectional stripes.
    struct StripeSpec {
        double angle_deg = 90.0;
        double spread_deg = 5.0;
        double amplitude = 0.2; // RMS of the field
        std::uint64_t seed = 1;

        void validate() const {
            if (!(angle_deg >= 0.0 && angle_deg < 180.0))
                throw InvalidInputError("stripe angle must be in [0, 180)");
            if (!(spread_deg >= 0.0 && spread_deg < 180.0))
                throw InvalidInputError("stripe spread must be in [0, 180)");
            if (!(amplitude >= 0.0) || !std::isfinite(amplitude))
                throw InvalidInputError("stripe amplitude must be >= 0");
        }

        /// The wedge that contains the field's spectrum.
        [[nodiscard]] WedgeSpec support() const noexcept {
            return WedgeSpec{angle_deg, spread_deg, 0.0, spread_deg == 0.0};
        }
    };

    /// Gaussian noise with sigma = mean / snr.
    struct NoiseSpec {
        double snr = 10.0;
        std::uint64_t seed = 1;

        void validate() const {
            if (!(snr > 0.0))
                throw InvalidInputError("snr must be > 0, got " + std::to_string(snr));
        }
    };

    /// splitmix64 step; gives independent streams from one user seed.
    [[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
        std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    namespace detail {

        inline void paint_rectangles(ImageGrid& img, std::mt19937_64& rng) {
            const std::size_t w = img.width();
            const std::size_t h = img.height();
            std::uniform_real_distribution<double> level(0.4, 1.0);
            // one rectangle per quadrant so edges do not pile up
            for (std::size_t qy = 0; qy < 2; ++qy) {
                for (std::size_t qx = 0; qx < 2; ++qx) {
                    const std::size_t qw = w / 2;
                    const std::size_t qh = h / 2;
                    const std::size_t x0 = qx * qw + std::uniform_int_distribution<std::size_t>(2, qw / 8 + 2)(rng);
                    const std::size_t y0 = qy * qh + std::uniform_int_distribution<std::size_t>(2, qh / 8 + 2)(rng);
                    const std::size_t max_w = qx * qw + qw - 2 - x0;
                    const std::size_t max_h = qy * qh + qh - 2 - y0;
                    const std::size_t rw = std::uniform_int_distribution<std::size_t>(std::min(max_w, w / 6), max_w)(rng);
                    const std::size_t rh = std::uniform_int_distribution<std::size_t>(std::min(max_h, h / 6), max_h)(rng);
                    const double value = level(rng);
                    for (std::size_t row = y0; row < y0 + rh; ++row)
                        for (std::size_t col = x0; col < x0 + rw; ++col)
                            img(row, col) = value;
                }
            }
        }

        inline void paint_disks(ImageGrid& img, std::mt19937_64& rng) {
            const auto w = static_cast<double>(img.width());
            const auto h = static_cast<double>(img.height());
            const double side = std::min(w, h);
            std::uniform_real_distribution<double> cx(0.0, w);
            std::uniform_real_distribution<double> cy(0.0, h);
            std::uniform_real_distribution<double> radius(side / 16.0, side / 6.0);
            std::uniform_real_distribution<double> level(0.4, 1.0);
            for (int d = 0; d < 8; ++d) {
                const double x = cx(rng);
                const double y = cy(rng);
                const double r = radius(rng);
                const double value = level(rng);
                for (std::size_t row = 0; row < img.height(); ++row) {
                    for (std::size_t col = 0; col < img.width(); ++col) {
                        const double dx = static_cast<double>(col) + 0.5 - x;
                        const double dy = static_cast<double>(row) + 0.5 - y;
                        if (dx * dx + dy * dy <= r * r)
                            img(row, col) = value;
                    }
                }
            }
        }

        inline void paint_interface(ImageGrid& img, double tilt_deg) {
            const auto [c, s] = cos_sin_deg(tilt_deg);
            const double half_w = static_cast<double>(img.width()) / 2.0;
            const double half_h = static_cast<double>(img.height()) / 2.0;
            for (std::size_t row = 0; row < img.height(); ++row) {
                for (std::size_t col = 0; col < img.width(); ++col) {
                    // signed distance to a line through the centre, tilted CCW from vertical (y up)
                    const double x = static_cast<double>(col) + 0.5 - half_w;
                    const double y_up = half_h - (static_cast<double>(row) + 0.5);
                    img(row, col) = x * c + y_up * s >= 0.0 ? 0.7 : 0.3;
                }
            }
        }

    } // namespace detail

    /// Piecewise-constant test image with values in [0, 1].
    ///
    /// `interface_tilt_deg` only applies to PhantomKind::interface: 0 gives
    /// a single vertical boundary at column width/2.
    [[nodiscard]] inline ImageGrid make_phantom(PhantomKind kind, std::size_t width, std::size_t height,
                                                std::uint64_t seed, double interface_tilt_deg = 0.0) {
        if (width < 16 || height < 16)
            throw InvalidInputError("make_phantom: dimensions must be at least 16x16");

        std::mt19937_64 rng(seed);
        switch (kind) {
        case PhantomKind::rectangles: {
            ImageGrid img(width, height, 0.2);
            detail::paint_rectangles(img, rng);
            return img;
        }
        case PhantomKind::disks: {
            ImageGrid img(width, height, 0.2);
            detail::paint_disks(img, rng);
            return img;
        }
        case PhantomKind::interface: {
            ImageGrid img(width, height, 0.3);
            detail::paint_interface(img, interface_tilt_deg);
            return img;
        }
        }
        throw InvalidInputError("make_phantom: unknown kind");
    }

    /// Wedge-filtered white noise rescaled to RMS = amplitude. The spectrum is
    /// zero outside the stripe wedge and at DC.
    [[nodiscard]] inline ImageGrid make_stripe_field(const StripeSpec& spec, std::size_t width, std::size_t height) {
        spec.validate();
        ImageGrid field(width, height, 0.0);
        if (spec.amplitude == 0.0)
            return field;

        std::mt19937_64 rng(spec.seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (double& v : field.pixels())
            v = gauss(rng);

        const WedgeMask support = build_mask(spec.support(), width, height);
        Spectrum spectrum = fft2_forward(field);
        auto coeffs = spectrum.coeffs();
        for (std::size_t i = 0; i < coeffs.size(); ++i)
            if (support.keep_at(i))
                coeffs[i] = Complex{0.0, 0.0};
        coeffs[0] = Complex{0.0, 0.0};
        field = fft2_inverse(spectrum);

        double sum_sq = 0.0;
        for (double v : field.pixels())
            sum_sq += v * v;
        const double rms = std::sqrt(sum_sq / static_cast<double>(field.size()));
        if (rms == 0.0)
            return field;
        const double gain = spec.amplitude / rms;
        for (double& v : field.pixels())
            v *= gain;
        return field;
    }

    /// img + N(0, sigma^2) with sigma = mean(img) / snr.
    [[nodiscard]] inline ImageGrid add_noise(const ImageGrid& img, const NoiseSpec& spec) {
        spec.validate();
        const double mu = mean(img);
        if (!(mu > 0.0))
            throw InvalidInputError("add_noise: image mean must be > 0 for the SNR definition, got " +
                                    std::to_string(mu));
        const double sigma = mu / spec.snr;

        std::mt19937_64 rng(spec.seed);
        std::normal_distribution<double> gauss(0.0, sigma);
        ImageGrid out = img;
        for (double& v : out.pixels())
            v += gauss(rng);
        return out;
    }

    /// Pixelwise sum; the corruption model is purely additive.
    [[nodiscard]] inline ImageGrid add(const ImageGrid& a, const ImageGrid& b) {
        require_same_shape(a, b, "add");
        ImageGrid out = a;
        auto po = out.pixels();
        const auto pb = b.pixels();
        for (std::size_t i = 0; i < po.size(); ++i)
            po[i] += pb[i];
        return out;
    }

} // namespace destripe
