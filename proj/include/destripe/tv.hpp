#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "destripe/errors.hpp"
#include "destripe/image.hpp"

namespace destripe {

    /// Isotropic, epsilon-smoothed total variation with forward differences
    /// and replicate boundary (the last column has Dx = 0, the last row Dy = 0).
    struct TvOptions {
        double epsilon = 1e-8;

        void validate() const {
            if (!(epsilon > 0.0) || !std::isfinite(epsilon))
                throw InvalidInputError("TV epsilon must be > 0, got " + std::to_string(epsilon));
        }
    };

    namespace detail {

        inline double forward_dx(const ImageGrid& img, std::size_t row, std::size_t col) noexcept {
            return col + 1 < img.width() ? img(row, col + 1) - img(row, col) : 0.0;
        }

        inline double forward_dy(const ImageGrid& img, std::size_t row, std::size_t col) noexcept {
            return row + 1 < img.height() ? img(row + 1, col) - img(row, col) : 0.0;
        }

    } // namespace detail

    /// sum sqrt(Dx^2 + Dy^2 + eps) - sum sqrt(eps). Each term is evaluated as
    /// g^2 / (sqrt(g^2 + eps) + sqrt(eps)) so flat regions contribute exactly 0.
    [[nodiscard]] inline double tv_norm(const ImageGrid& img, const TvOptions& opts = {}) {
        opts.validate();
        const double root_eps = std::sqrt(opts.epsilon);
        double total = 0.0;
        for (std::size_t row = 0; row < img.height(); ++row) {
            double row_sum = 0.0;
            for (std::size_t col = 0; col < img.width(); ++col) {
                const double dx = detail::forward_dx(img, row, col);
                const double dy = detail::forward_dy(img, row, col);
                const double g2 = dx * dx + dy * dy;
                row_sum += g2 / (std::sqrt(g2 + opts.epsilon) + root_eps);
            }
            total += row_sum;
        }
        return total;
    }

    /// Exact derivative of tv_norm with respect to every pixel.
    [[nodiscard]] inline ImageGrid tv_gradient(const ImageGrid& img, const TvOptions& opts = {}) {
        opts.validate();
        const std::size_t w = img.width();
        const std::size_t h = img.height();

        // Normalized differences Dx/T and Dy/T per pixel, T = sqrt(Dx^2 + Dy^2 + eps).
        ImageGrid nx(w, h);
        ImageGrid ny(w, h);
        for (std::size_t row = 0; row < h; ++row) {
            for (std::size_t col = 0; col < w; ++col) {
                const double dx = detail::forward_dx(img, row, col);
                const double dy = detail::forward_dy(img, row, col);
                const double t = std::sqrt(dx * dx + dy * dy + opts.epsilon);
                nx(row, col) = dx / t;
                ny(row, col) = dy / t;
            }
        }

        ImageGrid grad(w, h);
        for (std::size_t row = 0; row < h; ++row) {
            for (std::size_t col = 0; col < w; ++col) {
                // own term: d/dx(i,j) of Dx and Dy is -1 unless the difference is a boundary zero
                double g = 0.0;
                if (col + 1 < w)
                    g -= nx(row, col);
                if (row + 1 < h)
                    g -= ny(row, col);
                // left neighbour's Dx and upper neighbour's Dy both contain +x(i,j)
                if (col > 0)
                    g += nx(row, col - 1);
                if (row > 0)
                    g += ny(row - 1, col);
                grad(row, col) = g;
            }
        }
        return grad;
    }

} // namespace destripe
