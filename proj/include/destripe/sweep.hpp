#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "destripe/metrics.hpp"
#include "destripe/recon.hpp"
#include "destripe/synth.hpp"
#include "destripe/wedge.hpp"

namespace destripe {

    /// Wedge x SNR x seed study on a synthetic phantom. Each cell corrupts the
    /// phantom with stripes of spread min(wedge, 5 deg), reconstructs with the
    /// cell's wedge and scores against the clean phantom.
    struct SweepConfig {
        std::vector<double> wedges_deg;
        std::vector<double> snrs; // +inf = noiseless
        std::vector<std::uint64_t> seeds;
        PhantomKind phantom = PhantomKind::rectangles;
        std::size_t size = 128;
        double stripe_angle_deg = 90.0;
        double stripe_amplitude = 0.2;
        double max_stripe_spread_deg = 5.0;
        double dc_notch_radius = 0.0;
        ReconParams recon;
        std::size_t threads = 1;
        bool record_runtime = false;

        void validate() const {
            if (wedges_deg.empty())
                throw InvalidInputError("sweep: wedge list is empty");
            if (snrs.empty())
                throw InvalidInputError("sweep: snr list is empty");
            if (seeds.empty())
                throw InvalidInputError("sweep: seed list is empty");
            for (double w : wedges_deg)
                WedgeSpec{stripe_angle_deg, w, dc_notch_radius}.validate();
            for (double s : snrs)
                if (!(s > 0.0))
                    throw InvalidInputError("sweep: snr values must be > 0");
            recon.validate();
        }
    };

    struct SweepRow {
        EvalRecord record;
        std::uint64_t seed = 0;
        bool diverged = false;
    };

    namespace detail {

        inline SweepRow run_sweep_cell(const SweepConfig& cfg, double wedge, double snr, std::uint64_t seed) {
            const auto started = std::chrono::steady_clock::now();
            SweepRow row;
            row.seed = seed;
            row.record.wedge_width_deg = wedge;
            row.record.snr = snr;

            const ImageGrid clean = make_phantom(cfg.phantom, cfg.size, cfg.size, derive_seed(seed, 0));
            const StripeSpec stripes{cfg.stripe_angle_deg, std::min(wedge, cfg.max_stripe_spread_deg),
                                     cfg.stripe_amplitude, derive_seed(seed, 1)};
            ImageGrid observed = add(clean, make_stripe_field(stripes, cfg.size, cfg.size));
            if (std::isfinite(snr))
                observed = add_noise(observed, NoiseSpec{snr, derive_seed(seed, 2)});

            const WedgeMask mask = build_mask(WedgeSpec{cfg.stripe_angle_deg, wedge, cfg.dc_notch_radius},
                                              cfg.size, cfg.size);
            try {
                const ReconResult recon = reconstruct(observed, mask, cfg.recon);
                row.record.rmse_recon = rmse(recon.image, clean);
                row.record.rmse_wedge = rmse(wedge_deleted(observed, mask), clean);
                row.record.normalized_rmse = row.record.rmse_wedge > 0.0
                                                 ? row.record.rmse_recon / row.record.rmse_wedge
                                                 : std::numeric_limits<double>::quiet_NaN();
            } catch (const DivergenceError&) {
                row.diverged = true;
                row.record.rmse_recon = row.record.rmse_wedge = row.record.normalized_rmse =
                    std::numeric_limits<double>::quiet_NaN();
            }
            row.record.runtime_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
            return row;
        }

        inline std::string format_number(double v) {
            if (std::isnan(v))
                return "nan";
            if (std::isinf(v))
                return v > 0 ? "inf" : "-inf";
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.10g", v);
            return buf;
        }

    } // namespace detail

    /// Rows in wedge-major, then snr, then seed order regardless of thread count.
    [[nodiscard]] inline std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
        cfg.validate();
        struct Cell {
            double wedge;
            double snr;
            std::uint64_t seed;
        };
        std::vector<Cell> cells;
        for (double w : cfg.wedges_deg)
            for (double s : cfg.snrs)
                for (std::uint64_t seed : cfg.seeds)
                    cells.push_back({w, s, seed});

        std::vector<SweepRow> rows(cells.size());
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next++; i < cells.size(); i = next++)
                rows[i] = detail::run_sweep_cell(cfg, cells[i].wedge, cells[i].snr, cells[i].seed);
        };

        const std::size_t n_threads = std::clamp<std::size_t>(cfg.threads, 1, std::max<std::size_t>(1, cells.size()));
        if (n_threads == 1) {
            worker();
        } else {
            std::vector<std::jthread> pool;
            for (std::size_t t = 0; t < n_threads; ++t)
                pool.emplace_back(worker);
        }
        return rows;
    }

    /// Header: wedge_deg,snr,seed,rmse_recon,rmse_wedge,normalized_rmse,runtime_s,status.
    /// runtime_s is left empty unless requested so identical runs give identical bytes.
    inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows, bool record_runtime,
                                const std::string& comment = {}) {
        if (!comment.empty())
            os << "# " << comment << '\n';
        os << "wedge_deg,snr,seed,rmse_recon,rmse_wedge,normalized_rmse,runtime_s,status\n";
        for (const auto& row : rows) {
            const auto& r = row.record;
            os << detail::format_number(r.wedge_width_deg) << ',' << detail::format_number(r.snr) << ','
               << row.seed << ',' << detail::format_number(r.rmse_recon) << ','
               << detail::format_number(r.rmse_wedge) << ',' << detail::format_number(r.normalized_rmse) << ','
               << (record_runtime ? detail::format_number(r.runtime_seconds) : std::string{}) << ','
               << (row.diverged ? "diverged" : "ok") << '\n';
        }
    }

} // namespace destripe
