#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "destripe/errors.hpp"

namespace destripe {

    using Complex = std::complex<double>;

    /// Real-valued grayscale image, row-major, origin top-left.
    ///
    /// Dimensions are fixed at construction. Pixel values are expected to be
    /// finite; the transforms check this at their boundary.
    class ImageGrid {
    public:
        ImageGrid() = default;

        ImageGrid(std::size_t width, std::size_t height, double fill = 0.0)
            : width_(width), height_(height), pixels_(width * height, fill) {
            if (width == 0 || height == 0)
                throw InvalidInputError("ImageGrid: dimensions must be positive");
        }

        ImageGrid(std::size_t width, std::size_t height, std::vector<double> pixels)
            : width_(width), height_(height), pixels_(std::move(pixels)) {
            if (width == 0 || height == 0)
                throw InvalidInputError("ImageGrid: dimensions must be positive");
            if (pixels_.size() != width * height)
                throw ShapeError("ImageGrid: pixel count " + std::to_string(pixels_.size()) +
                                 " does not match " + std::to_string(width) + "x" + std::to_string(height));
        }

        [[nodiscard]] std::size_t width() const noexcept { return width_; }
        [[nodiscard]] std::size_t height() const noexcept { return height_; }
        [[nodiscard]] std::size_t size() const noexcept { return pixels_.size(); }

        [[nodiscard]] double& operator()(std::size_t row, std::size_t col) noexcept {
            return pixels_[row * width_ + col];
        }
        [[nodiscard]] double operator()(std::size_t row, std::size_t col) const noexcept {
            return pixels_[row * width_ + col];
        }

        [[nodiscard]] std::span<double> pixels() noexcept { return pixels_; }
        [[nodiscard]] std::span<const double> pixels() const noexcept { return pixels_; }

        [[nodiscard]] bool all_finite() const noexcept {
            return std::all_of(pixels_.begin(), pixels_.end(), [](double v) { return std::isfinite(v); });
        }

        [[nodiscard]] bool same_shape(const ImageGrid& other) const noexcept {
            return width_ == other.width_ && height_ == other.height_;
        }

        friend bool operator==(const ImageGrid&, const ImageGrid&) = default;

    private:
        std::size_t width_ = 0;
        std::size_t height_ = 0;
        std::vector<double> pixels_;
    };

    /// Full complex 2D spectrum with DC stored at (0,0) (unshifted).
    ///
    /// Index u runs along the width (columns), v along the height (rows).
    class Spectrum {
    public:
        Spectrum() = default;

        Spectrum(std::size_t width, std::size_t height)
            : width_(width), height_(height), coeffs_(width * height) {}

        Spectrum(std::size_t width, std::size_t height, std::vector<Complex> coeffs)
            : width_(width), height_(height), coeffs_(std::move(coeffs)) {
            if (coeffs_.size() != width * height)
                throw ShapeError("Spectrum: coefficient count does not match dimensions");
        }

        [[nodiscard]] std::size_t width() const noexcept { return width_; }
        [[nodiscard]] std::size_t height() const noexcept { return height_; }
        [[nodiscard]] std::size_t size() const noexcept { return coeffs_.size(); }

        [[nodiscard]] Complex& at(std::size_t u, std::size_t v) noexcept { return coeffs_[v * width_ + u]; }
        [[nodiscard]] const Complex& at(std::size_t u, std::size_t v) const noexcept { return coeffs_[v * width_ + u]; }

        [[nodiscard]] std::span<Complex> coeffs() noexcept { return coeffs_; }
        [[nodiscard]] std::span<const Complex> coeffs() const noexcept { return coeffs_; }

        friend bool operator==(const Spectrum&, const Spectrum&) = default;

    private:
        std::size_t width_ = 0;
        std::size_t height_ = 0;
        std::vector<Complex> coeffs_;
    };

    /// Signed frequency of storage index `index` along an axis of length `n`:
    /// ((index + n/2) mod n) - n/2. This is the centered view; no data moves.
    [[nodiscard]] constexpr long signed_frequency(std::size_t index, std::size_t n) noexcept {
        const auto half = static_cast<long>(n / 2);
        return static_cast<long>((index + n / 2) % n) - half;
    }

    /// Storage index of the negated frequency, (-index) mod n.
    [[nodiscard]] constexpr std::size_t negated_index(std::size_t index, std::size_t n) noexcept {
        return index == 0 ? 0 : n - index;
    }

    /// Storage index holding centered position `centered` (0 = most negative frequency).
    [[nodiscard]] constexpr std::size_t storage_index_of_centered(std::size_t centered, std::size_t n) noexcept {
        return (centered + n - n / 2) % n;
    }

    inline void require_same_shape(const ImageGrid& a, const ImageGrid& b, const char* what) {
        if (!a.same_shape(b))
            throw ShapeError(std::string(what) + ": shape mismatch (" + std::to_string(a.width()) + "x" +
                             std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                             std::to_string(b.height()) + ")");
    }

    [[nodiscard]] inline double mean(const ImageGrid& img) noexcept {
        double sum = 0.0;
        for (double v : img.pixels())
            sum += v;
        return sum / static_cast<double>(img.size());
    }

    /// Euclidean norm of a - b over all pixels.
    [[nodiscard]] inline double distance(const ImageGrid& a, const ImageGrid& b) {
        require_same_shape(a, b, "distance");
        double sum = 0.0;
        const auto pa = a.pixels();
        const auto pb = b.pixels();
        for (std::size_t i = 0; i < pa.size(); ++i) {
            const double d = pa[i] - pb[i];
            sum += d * d;
        }
        return std::sqrt(sum);
    }

    [[nodiscard]] inline double norm(const ImageGrid& a) noexcept {
        double sum = 0.0;
        for (double v : a.pixels())
            sum += v * v;
        return std::sqrt(sum);
    }

} // namespace destripe
