#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "destripe/errors.hpp"
#include "destripe/fft.hpp"
#include "destripe/image.hpp"
#include "destripe/tv.hpp"
#include "destripe/wedge.hpp"

namespace destripe {

    /// Parameters of the data-constrained TV minimization.
    ///
    /// The TV step length starts at `alpha` times the distance moved by the
    /// first data projection and is multiplied by `step_reduction` after any
    /// outer iteration whose TV move exceeds `max_tv_to_projection_ratio`
    /// times the projection distance (adaptive steepest descent POCS).
    struct ReconParams {
        double alpha = 0.1;
        std::size_t iterations = 150;
        std::size_t tv_steps = 20;
        bool positivity = false;
        std::optional<double> stop_rel_change;

        double max_tv_to_projection_ratio = 0.95;
        double step_reduction = 0.95;
        /// TV smoothing as a fraction of the observed dynamic range:
        /// epsilon = (tv_smoothing * (max - min))^2.
        double tv_smoothing = 0.01;
        std::size_t max_step_halvings = 30;

        void validate() const {
            if (!(alpha > 0.0 && alpha <= 1.0))
                throw InvalidInputError("alpha must be in (0, 1], got " + std::to_string(alpha));
            if (iterations < 1)
                throw InvalidInputError("iterations must be >= 1");
            if (tv_steps < 1)
                throw InvalidInputError("tv_steps must be >= 1");
            if (stop_rel_change && !(*stop_rel_change > 0.0))
                throw InvalidInputError("stop_rel_change must be > 0");
            if (!(max_tv_to_projection_ratio > 0.0))
                throw InvalidInputError("max_tv_to_projection_ratio must be > 0");
            if (!(step_reduction > 0.0 && step_reduction <= 1.0))
                throw InvalidInputError("step_reduction must be in (0, 1]");
            if (!(tv_smoothing > 0.0) || !std::isfinite(tv_smoothing))
                throw InvalidInputError("tv_smoothing must be > 0");
        }
    };

    struct IterationRecord {
        std::size_t iteration = 0; // 1-based
        double tv_before = 0.0;    // TV right after the data projection
        double tv_value = 0.0;     // TV after the inner descent loop
        double dp = 0.0;           // distance moved by the data projection
        double dtvg = 0.0;         // TV step length used in this iteration
        double rel_change = 0.0;   // ||x_k - x_{k-1}|| / ||x_{k-1}||
    };

    struct ReconTrace {
        std::vector<IterationRecord> iterations;
        double tv_epsilon = 0.0;
    };

    struct ReconResult {
        ImageGrid image;
        ReconTrace trace;
    };

    /// Replace the kept coefficients of `img` by the measured ones and return
    /// the real image; deleted coefficients keep the current estimate.
    [[nodiscard]] inline ImageGrid project_data_constraint(const ImageGrid& img, const Spectrum& measured,
                                                           const WedgeMask& mask) {
        require_same_shape(measured, mask, "project_data_constraint");
        if (img.width() != mask.width() || img.height() != mask.height())
            throw ShapeError("project_data_constraint: image does not match mask");

        Spectrum current = fft2_forward(img);
        auto coeffs = current.coeffs();
        const auto given = measured.coeffs();
        for (std::size_t i = 0; i < coeffs.size(); ++i)
            if (mask.keep_at(i))
                coeffs[i] = given[i];
        return fft2_inverse(current);
    }

    /// Per-pixel absolute difference |a - b|.
    [[nodiscard]] inline ImageGrid residual(const ImageGrid& a, const ImageGrid& b) {
        require_same_shape(a, b, "residual");
        ImageGrid out(a.width(), a.height());
        const auto pa = a.pixels();
        const auto pb = b.pixels();
        auto po = out.pixels();
        for (std::size_t i = 0; i < po.size(); ++i)
            po[i] = std::abs(pa[i] - pb[i]);
        return out;
    }

    /// The observed image with every deleted coefficient set to zero.
    [[nodiscard]] inline ImageGrid wedge_deleted(const ImageGrid& observed, const WedgeMask& mask) {
        return fft2_inverse(apply_mask(fft2_forward(observed), mask));
    }

    namespace detail {

        inline double tv_epsilon_for(const ImageGrid& observed, double smoothing) {
            const auto [lo, hi] = std::minmax_element(observed.pixels().begin(), observed.pixels().end());
            const double range = *hi - *lo;
            const double scale = range > 0.0 ? range : 1.0;
            return (smoothing * scale) * (smoothing * scale);
        }

        inline void clamp_negative(ImageGrid& img) noexcept {
            for (double& v : img.pixels())
                v = std::max(v, 0.0);
        }

        // Normalized steepest descent on TV; each step is shortened until TV
        // does not increase. Returns the TV of the final image.
        inline double descend_tv(ImageGrid& x, double step, double tv_start, const TvOptions& tv_opts,
                                 const ReconParams& params) {
            double current = tv_start;
            ImageGrid trial(x.width(), x.height());
            for (std::size_t s = 0; s < params.tv_steps; ++s) {
                const ImageGrid grad = tv_gradient(x, tv_opts);
                const double grad_norm = norm(grad);
                if (grad_norm < 1e-12)
                    break;

                bool accepted = false;
                double length = step;
                for (std::size_t halving = 0; halving <= params.max_step_halvings; ++halving) {
                    const double scale = length / grad_norm;
                    const auto px = x.pixels();
                    const auto pg = grad.pixels();
                    auto pt = trial.pixels();
                    for (std::size_t i = 0; i < pt.size(); ++i)
                        pt[i] = px[i] - scale * pg[i];
                    const double tv_trial = tv_norm(trial, tv_opts);
                    if (tv_trial <= current) {
                        std::swap(x, trial);
                        current = tv_trial;
                        accepted = true;
                        break;
                    }
                    length *= 0.5;
                }
                if (!accepted)
                    break;
            }
            return current;
        }

    } // namespace detail

    /// Minimize TV subject to the Fourier data constraint on the kept bins of
    /// `mask`. The result always satisfies the constraint up to FFT round-off.
    [[nodiscard]] inline ReconResult reconstruct(const ImageGrid& observed, const WedgeMask& mask,
                                                 const ReconParams& params = {}) {
        params.validate();
        if (observed.width() != mask.width() || observed.height() != mask.height())
            throw ShapeError("reconstruct: observed image does not match mask");

        const Spectrum measured = apply_mask(fft2_forward(observed), mask);

        ReconResult result;
        result.trace.tv_epsilon = detail::tv_epsilon_for(observed, params.tv_smoothing);
        const TvOptions tv_opts{result.trace.tv_epsilon};

        ImageGrid x = observed;
        double step = 0.0;
        for (std::size_t k = 0; k < params.iterations; ++k) {
            const ImageGrid previous = x;

            // The first projection zero-fills the deleted bins; afterwards
            // they carry the current estimate.
            ImageGrid projected = k == 0 ? fft2_inverse(measured) : project_data_constraint(x, measured, mask);
            if (params.positivity)
                detail::clamp_negative(projected);
            const double dp = distance(x, projected);
            x = std::move(projected);
            if (k == 0)
                step = params.alpha * dp;

            IterationRecord rec;
            rec.iteration = k + 1;
            rec.dp = dp;
            rec.dtvg = step;
            rec.tv_before = tv_norm(x, tv_opts);

            const ImageGrid start = x;
            rec.tv_value = detail::descend_tv(x, step, rec.tv_before, tv_opts, params);
            if (distance(x, start) > params.max_tv_to_projection_ratio * dp)
                step *= params.step_reduction;

            const double prev_norm = norm(previous);
            const double moved = distance(x, previous);
            rec.rel_change = prev_norm > 0.0 ? moved / prev_norm : moved;

            if (!std::isfinite(rec.dp) || !std::isfinite(rec.tv_value) || !std::isfinite(rec.rel_change) ||
                !x.all_finite())
                throw DivergenceError(rec.iteration,
                                      "reconstruct: non-finite values at iteration " + std::to_string(rec.iteration));
            result.trace.iterations.push_back(rec);

            if (params.stop_rel_change && rec.rel_change < *params.stop_rel_change)
                break;
        }

        result.image = project_data_constraint(x, measured, mask);
        if (!result.image.all_finite())
            throw DivergenceError(result.trace.iterations.size(), "reconstruct: non-finite output");
        return result;
    }

    [[nodiscard]] inline ReconResult reconstruct(const ImageGrid& observed, const WedgeSpec& spec,
                                                 const ReconParams& params = {}) {
        return reconstruct(observed, build_mask(spec, observed.width(), observed.height()), params);
    }

    /// CSV with columns iteration,tv_value,dp,dtvg,rel_change,tv_before.
    inline void write_trace_csv(std::ostream& os, const ReconTrace& trace) {
        os << "iteration,tv_value,dp,dtvg,rel_change,tv_before\n";
        char line[256];
        for (const auto& r : trace.iterations) {
            std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.iteration, r.tv_value, r.dp,
                          r.dtvg, r.rel_change, r.tv_before);
            os << line;
        }
    }

} // namespace destripe
