#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include <fftw3.h>

#include "destripe/errors.hpp"
#include "destripe/image.hpp"

namespace destripe {

    namespace detail {

        static_assert(sizeof(fftw_complex) == sizeof(Complex));

        // FFTW's planner is not thread-safe but executing an existing plan on
        // new arrays is. Plans are created once per (width, height, sign) with
        // FFTW_UNALIGNED so they work on any std::vector buffer, and with
        // FFTW_ESTIMATE so the same plan (hence the same bits) is chosen on
        // every run.
        class PlanCache {
        public:
            PlanCache() = default;
            PlanCache(const PlanCache&) = delete;
            PlanCache& operator=(const PlanCache&) = delete;

            ~PlanCache() {
                for (auto& [key, plan] : plans_)
                    fftw_destroy_plan(plan);
            }

            fftw_plan get(std::size_t width, std::size_t height, int sign) {
                const std::lock_guard lock(mutex_);
                const auto key = std::make_tuple(width, height, sign);
                if (auto it = plans_.find(key); it != plans_.end())
                    return it->second;

                std::vector<Complex> in(width * height), out(width * height);
                fftw_plan plan = fftw_plan_dft_2d(static_cast<int>(height), static_cast<int>(width),
                                                  reinterpret_cast<fftw_complex*>(in.data()),
                                                  reinterpret_cast<fftw_complex*>(out.data()), sign,
                                                  FFTW_ESTIMATE | FFTW_UNALIGNED);
                if (plan == nullptr)
                    throw Error("fft: FFTW failed to create a plan");
                plans_.emplace(key, plan);
                return plan;
            }

        private:
            std::mutex mutex_;
            std::map<std::tuple<std::size_t, std::size_t, int>, fftw_plan> plans_;
        };

        inline PlanCache& plan_cache() {
            static PlanCache cache;
            return cache;
        }

        inline void execute(std::vector<Complex>& in, std::vector<Complex>& out, std::size_t width,
                            std::size_t height, int sign) {
            fftw_plan plan = plan_cache().get(width, height, sign);
            fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()),
                             reinterpret_cast<fftw_complex*>(out.data()));
        }

        inline void require_transform_size(std::size_t width, std::size_t height, const char* what) {
            if (width < 2 || height < 2)
                throw InvalidInputError(std::string(what) + ": dimensions must be at least 2x2, got " +
                                        std::to_string(width) + "x" + std::to_string(height));
        }

    } // namespace detail

    /// Largest |C(u,v) - conj(C(-u,-v))| relative to the largest coefficient magnitude.
    [[nodiscard]] inline double hermitian_defect(const Spectrum& spec) noexcept {
        const std::size_t w = spec.width();
        const std::size_t h = spec.height();
        double max_mag = 0.0;
        double max_defect = 0.0;
        for (std::size_t v = 0; v < h; ++v) {
            const std::size_t nv = negated_index(v, h);
            for (std::size_t u = 0; u < w; ++u) {
                const Complex c = spec.at(u, v);
                max_mag = std::max(max_mag, std::abs(c));
                max_defect = std::max(max_defect, std::abs(c - std::conj(spec.at(negated_index(u, w), nv))));
            }
        }
        return max_mag > 0.0 ? max_defect / max_mag : 0.0;
    }

    /// Unnormalized forward DFT: C(u,v) = sum x(m,n) exp(-2 pi i (u m / w + v n / h)).
    [[nodiscard]] inline Spectrum fft2_forward(const ImageGrid& img) {
        detail::require_transform_size(img.width(), img.height(), "fft2_forward");
        if (!img.all_finite())
            throw InvalidInputError("fft2_forward: image contains non-finite pixels");

        std::vector<Complex> in(img.pixels().begin(), img.pixels().end());
        std::vector<Complex> out(in.size());
        detail::execute(in, out, img.width(), img.height(), FFTW_FORWARD);

        // pair each bin with its conjugate partner: output is exactly Hermitian
        const std::size_t w = img.width();
        const std::size_t h = img.height();
        for (std::size_t v = 0; v < h; ++v) {
            const std::size_t nv = negated_index(v, h);
            for (std::size_t u = 0; u < w; ++u) {
                const std::size_t i = v * w + u;
                const std::size_t j = nv * w + negated_index(u, w);
                if (j < i)
                    continue;
                const Complex a = out[i];
                const Complex b = out[j];
                out[i] = 0.5 * (a + std::conj(b));
                out[j] = std::conj(out[i]);
            }
        }
        return {w, h, std::move(out)};
    }

    /// Normalized inverse DFT (divides by w*h). The spectrum must be Hermitian
    /// within 1e-6 relative tolerance; the imaginary residue is discarded.
    [[nodiscard]] inline ImageGrid fft2_inverse(const Spectrum& spec) {
        constexpr double symmetry_tolerance = 1e-6;

        detail::require_transform_size(spec.width(), spec.height(), "fft2_inverse");
        if (const double defect = hermitian_defect(spec); !(defect <= symmetry_tolerance))
            throw SymmetryError("fft2_inverse: spectrum is not Hermitian-symmetric (relative defect " +
                                std::to_string(defect) + ")");

        std::vector<Complex> in(spec.coeffs().begin(), spec.coeffs().end());
        std::vector<Complex> out(in.size());
        detail::execute(in, out, spec.width(), spec.height(), FFTW_BACKWARD);

        const double scale = 1.0 / static_cast<double>(in.size());
        std::vector<double> pixels(out.size());
        std::transform(out.begin(), out.end(), pixels.begin(), [scale](const Complex& c) { return c.real() * scale; });
        return {spec.width(), spec.height(), std::move(pixels)};
    }

} // namespace destripe
