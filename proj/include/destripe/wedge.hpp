#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "destripe/errors.hpp"
#include "destripe/image.hpp"

namespace destripe {

    /// Geometry of the deleted Fourier wedge, expressed in real-space terms.
    ///
    /// `stripe_angle_deg` is the direction the stripes extend along, measured
    /// counterclockwise from the +x (column) axis with y pointing up the
    /// displayed image. Vertical scratches are 90 deg; their energy sits on a
    /// horizontal line through DC, so the wedge is centred perpendicular to the
    /// stripes. `wedge_width_deg` is the full opening angle of the double
    /// wedge. With `line_mode` set, the width is ignored and exactly the
    /// one-bin-thick central line is deleted (unidirectional stripes).
    struct WedgeSpec {
        double stripe_angle_deg = 90.0;
        double wedge_width_deg = 8.0;
        double dc_notch_radius = 0.0;
        bool line_mode = false;

        void validate() const {
            if (!(stripe_angle_deg >= 0.0 && stripe_angle_deg < 180.0))
                throw InvalidInputError("stripe angle must be in [0, 180), got " + std::to_string(stripe_angle_deg));
            if (!(wedge_width_deg >= 0.0 && wedge_width_deg < 180.0))
                throw InvalidInputError("wedge width must be in [0, 180), got " + std::to_string(wedge_width_deg));
            if (!(dc_notch_radius >= 0.0) || !std::isfinite(dc_notch_radius))
                throw InvalidInputError("DC notch radius must be >= 0, got " + std::to_string(dc_notch_radius));
        }

        [[nodiscard]] bool deletes_anything() const noexcept { return line_mode || wedge_width_deg > 0.0; }
    };

    /// Binary pass/delete mask over unshifted frequency storage.
    class WedgeMask {
    public:
        WedgeMask() = default;
        WedgeMask(std::size_t width, std::size_t height, bool keep = true)
            : width_(width), height_(height), keep_(width * height, keep ? 1 : 0) {}

        [[nodiscard]] std::size_t width() const noexcept { return width_; }
        [[nodiscard]] std::size_t height() const noexcept { return height_; }
        [[nodiscard]] std::size_t size() const noexcept { return keep_.size(); }

        [[nodiscard]] bool keep(std::size_t u, std::size_t v) const noexcept { return keep_[v * width_ + u] != 0; }
        void set_keep(std::size_t u, std::size_t v, bool value) noexcept { keep_[v * width_ + u] = value ? 1 : 0; }

        /// Flat access in storage order (index = v * width + u).
        [[nodiscard]] bool keep_at(std::size_t index) const noexcept { return keep_[index] != 0; }

        [[nodiscard]] std::size_t deleted_count() const noexcept {
            std::size_t n = 0;
            for (auto k : keep_)
                n += k == 0 ? 1 : 0;
            return n;
        }

        friend bool operator==(const WedgeMask&, const WedgeMask&) = default;

    private:
        std::size_t width_ = 0;
        std::size_t height_ = 0;
        std::vector<std::uint8_t> keep_;
    };

    namespace detail {

        // cos/sin of an angle in degrees, exact at multiples of 90 so
        // axis-aligned wedges have no rounding slop.
        inline std::pair<double, double> cos_sin_deg(double deg) {
            const double reduced = std::fmod(deg, 360.0);
            if (reduced == 0.0)
                return {1.0, 0.0};
            if (reduced == 90.0)
                return {0.0, 1.0};
            if (reduced == 180.0)
                return {-1.0, 0.0};
            if (reduced == 270.0)
                return {0.0, -1.0};
            const double rad = reduced * std::numbers::pi / 180.0;
            return {std::cos(rad), std::sin(rad)};
        }

        inline bool in_wedge(const WedgeSpec& spec, std::size_t width, std::size_t height, long fu, long fv,
                             double cos_c, double sin_c, double tan_half) {
            const auto dfu = static_cast<double>(fu);
            const auto dfv = static_cast<double>(fv);
            if (std::hypot(dfu, dfv) <= spec.dc_notch_radius)
                return false;

            if (spec.line_mode) {
                // distance, in bins, from the centre line
                const double ex = static_cast<double>(width) * cos_c;
                const double ey = static_cast<double>(height) * sin_c;
                const double len = std::hypot(ex, ey);
                const double dist = std::abs(dfu * ey + dfv * ex) / len;
                return dist <= 0.5 + 1e-12;
            }

            // normalized (cycles per image dimension) coordinates, y up
            const double x = dfu / static_cast<double>(width);
            const double y = -dfv / static_cast<double>(height);
            const double along = std::abs(x * cos_c + y * sin_c);
            const double across = std::abs(x * sin_c - y * cos_c);
            const double slack = 1e-12 * std::hypot(x, y);
            return across <= tan_half * along + slack;
        }

    } // namespace detail

    /// Build the keep mask for a width x height spectrum. A bin is deleted iff
    /// its angular distance to the wedge centre line is <= half the wedge
    /// width and its radius exceeds the DC notch. DC is always kept and the
    /// mask is symmetric under frequency negation.
    [[nodiscard]] inline WedgeMask build_mask(const WedgeSpec& spec, std::size_t width, std::size_t height) {
        spec.validate();
        if (width < 2 || height < 2)
            throw InvalidInputError("build_mask: dimensions must be at least 2x2");

        WedgeMask mask(width, height, true);
        if (!spec.deletes_anything())
            return mask;

        const auto [cos_c, sin_c] = detail::cos_sin_deg(spec.stripe_angle_deg + 90.0);
        const double tan_half = std::tan(spec.wedge_width_deg * 0.5 * std::numbers::pi / 180.0);

        std::vector<std::uint8_t> raw(width * height, 1);
        for (std::size_t v = 0; v < height; ++v) {
            const long fv = signed_frequency(v, height);
            for (std::size_t u = 0; u < width; ++u) {
                const long fu = signed_frequency(u, width);
                if (detail::in_wedge(spec, width, height, fu, fv, cos_c, sin_c, tan_half))
                    raw[v * width + u] = 0;
            }
        }

        // On even axes the Nyquist bin is its own negation but carries the
        // frequency -n/2 for both partners, so symmetrize explicitly.
        for (std::size_t v = 0; v < height; ++v) {
            for (std::size_t u = 0; u < width; ++u) {
                const bool keep = raw[v * width + u] != 0 &&
                                  raw[negated_index(v, height) * width + negated_index(u, width)] != 0;
                mask.set_keep(u, v, keep);
            }
        }
        mask.set_keep(0, 0, true);
        return mask;
    }

    [[nodiscard]] inline double deleted_fraction(const WedgeMask& mask) noexcept {
        if (mask.size() == 0)
            return 0.0;
        return static_cast<double>(mask.deleted_count()) / static_cast<double>(mask.size());
    }

    inline void require_same_shape(const Spectrum& spec, const WedgeMask& mask, const char* what) {
        if (spec.width() != mask.width() || spec.height() != mask.height())
            throw ShapeError(std::string(what) + ": spectrum " + std::to_string(spec.width()) + "x" +
                             std::to_string(spec.height()) + " does not match mask " +
                             std::to_string(mask.width()) + "x" + std::to_string(mask.height()));
    }

    /// Zero every deleted coefficient; kept coefficients are copied unchanged.
    [[nodiscard]] inline Spectrum apply_mask(const Spectrum& spec, const WedgeMask& mask) {
        require_same_shape(spec, mask, "apply_mask");
        Spectrum out = spec;
        auto coeffs = out.coeffs();
        for (std::size_t i = 0; i < coeffs.size(); ++i)
            if (!mask.keep_at(i))
                coeffs[i] = Complex{0.0, 0.0};
        return out;
    }

    /// Bins kept by both masks; composes several single-direction wedges.
    [[nodiscard]] inline WedgeMask intersect(const WedgeMask& a, const WedgeMask& b) {
        if (a.width() != b.width() || a.height() != b.height())
            throw ShapeError("intersect: mask shapes differ");
        WedgeMask out(a.width(), a.height(), true);
        for (std::size_t v = 0; v < a.height(); ++v)
            for (std::size_t u = 0; u < a.width(); ++u)
                out.set_keep(u, v, a.keep(u, v) && b.keep(u, v));
        return out;
    }

    /// Mask rendered in the centered view (DC in the middle): 1 = kept, 0 = deleted.
    [[nodiscard]] inline ImageGrid centered_view(const WedgeMask& mask) {
        ImageGrid img(mask.width(), mask.height());
        for (std::size_t row = 0; row < mask.height(); ++row) {
            const std::size_t v = storage_index_of_centered(row, mask.height());
            for (std::size_t col = 0; col < mask.width(); ++col) {
                const std::size_t u = storage_index_of_centered(col, mask.width());
                img(row, col) = mask.keep(u, v) ? 1.0 : 0.0;
            }
        }
        return img;
    }

} // namespace destripe
