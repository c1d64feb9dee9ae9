#pragma once

#include <cmath>
#include <cstddef>
#include <limits>

#include "destripe/errors.hpp"
#include "destripe/fft.hpp"
#include "destripe/image.hpp"
#include "destripe/wedge.hpp"

namespace destripe {

    /// One (wedge width, SNR) evaluation cell. snr is +inf for noiseless runs.
    struct EvalRecord {
        double wedge_width_deg = 0.0;
        double snr = std::numeric_limits<double>::infinity();
        double rmse_recon = 0.0;
        double rmse_wedge = 0.0;
        double normalized_rmse = 0.0;
        double runtime_seconds = 0.0;
    };

    [[nodiscard]] inline double rmse(const ImageGrid& a, const ImageGrid& b) {
        require_same_shape(a, b, "rmse");
        const auto pa = a.pixels();
        const auto pb = b.pixels();
        double sum = 0.0;
        for (std::size_t i = 0; i < pa.size(); ++i) {
            const double d = pa[i] - pb[i];
            sum += d * d;
        }
        return std::sqrt(sum / static_cast<double>(pa.size()));
    }

    /// rmse(recon, clean) / rmse(wedge_deleted, clean). Below 1 means the
    /// reconstruction beat plain deletion of the wedge.
    [[nodiscard]] inline double normalized_rmse(const ImageGrid& clean, const ImageGrid& recon,
                                                const ImageGrid& wedge_deleted) {
        require_same_shape(clean, recon, "normalized_rmse");
        require_same_shape(clean, wedge_deleted, "normalized_rmse");
        const double denom = rmse(wedge_deleted, clean);
        if (!(denom > 0.0))
            throw DegenerateError("normalized_rmse: wedge-deleted image equals the clean image (nothing deleted)");
        return rmse(recon, clean) / denom;
    }

    /// Fraction of the non-DC spectral energy of `img` that lies in deleted bins.
    [[nodiscard]] inline double wedge_energy_fraction(const ImageGrid& img, const WedgeMask& mask) {
        if (img.width() != mask.width() || img.height() != mask.height())
            throw ShapeError("wedge_energy_fraction: image does not match mask");
        const Spectrum spec = fft2_forward(img);
        const auto coeffs = spec.coeffs();
        double total = 0.0;
        double inside = 0.0;
        for (std::size_t i = 1; i < coeffs.size(); ++i) {
            const double e = std::norm(coeffs[i]);
            total += e;
            if (!mask.keep_at(i))
                inside += e;
        }
        // FFT round-off leaves ~1e-16 relative energy off DC for a constant image
        if (!(total > 1e-24 * (total + std::norm(coeffs[0]))))
            throw DegenerateError("wedge_energy_fraction: image has no non-DC energy");
        return inside / total;
    }

} // namespace destripe
