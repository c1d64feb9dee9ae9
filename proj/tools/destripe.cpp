#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "destripe/destripe.hpp"

namespace {

    constexpr int exit_ok = 0;
    constexpr int exit_usage = 2;
    constexpr int exit_io = 3;
    constexpr int exit_diverged = 4;

    constexpr const char* angle_help =
        "Angle conventions: --stripe-angle is the direction the stripes run in the image, in degrees\n"
        "counterclockwise from the +x axis with y pointing up. Vertical scratches run at 90 deg;\n"
        "their Fourier energy lies on a horizontal line through the origin, so the deleted wedge is\n"
        "horizontal (vertical scratches -> horizontal Fourier wedge -> --stripe-angle 90).\n"
        "--wedge-width is the full opening angle of the deleted double wedge.";

    struct UsageError : std::runtime_error {
        using std::runtime_error::runtime_error;
    };

    struct WedgeFlags {
        double stripe_angle = 90.0;
        double wedge_width = 8.0;
        double dc_notch = 0.0;
        bool line_mode = false;

        void add_to(CLI::App& cmd) {
            cmd.add_option("--stripe-angle", stripe_angle, "Stripe direction in degrees, [0, 180)")
                ->check(CLI::Range(0.0, 179.999999999))
                ->capture_default_str();
            cmd.add_option("--wedge-width", wedge_width, "Full wedge opening angle in degrees, [0, 180)")
                ->check(CLI::Range(0.0, 179.999999999))
                ->capture_default_str();
            cmd.add_option("--dc-notch", dc_notch, "Radius in bins around DC that is always kept")
                ->check(CLI::NonNegativeNumber)
                ->capture_default_str();
            cmd.add_flag("--line-mode", line_mode, "Delete only the one-bin-thick central line");
        }

        [[nodiscard]] destripe::WedgeSpec spec() const { return {stripe_angle, wedge_width, dc_notch, line_mode}; }
    };

    struct ReconFlags {
        destripe::ReconParams params;
        double stop_rel_change = 0.0;

        void add_to(CLI::App& cmd) {
            cmd.add_option("--iterations", params.iterations, "Outer iterations")
                ->check(CLI::PositiveNumber)
                ->capture_default_str();
            cmd.add_option("--alpha", params.alpha, "TV step scale relative to the projection distance, (0, 1]")
                ->check(CLI::Validator(
                    [](std::string& text) -> std::string {
                        double v = 0.0;
                        if (!CLI::detail::lexical_cast(text, v) || !(v > 0.0 && v <= 1.0))
                            return "must be in (0, 1], got " + text;
                        return {};
                    },
                    "(0, 1]"))
                ->capture_default_str();
            cmd.add_option("--tv-steps", params.tv_steps, "Gradient steps per outer iteration")
                ->check(CLI::PositiveNumber)
                ->capture_default_str();
            cmd.add_flag("--positivity", params.positivity, "Clamp negative values after each TV step");
            cmd.add_option("--tv-smoothing", params.tv_smoothing,
                           "TV smoothing as a fraction of the observed value range")
                ->check(CLI::PositiveNumber)
                ->capture_default_str();
            cmd.add_option("--stop-rel-change", stop_rel_change,
                           "Stop early once the relative image change drops below this")
                ->check(CLI::PositiveNumber);
        }

        [[nodiscard]] destripe::ReconParams resolved() const {
            auto p = params;
            if (stop_rel_change > 0.0)
                p.stop_rel_change = stop_rel_change;
            return p;
        }
    };

    destripe::IntegerScaling scaling_from(bool rescale) {
        return rescale ? destripe::IntegerScaling::rescale : destripe::IntegerScaling::clamp;
    }

    double parse_snr(const std::string& text) {
        if (text == "inf" || text == "infinity" || text == "Inf")
            return std::numeric_limits<double>::infinity();
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(text, &used);
        } catch (const std::exception&) {
            throw UsageError("--snrs: cannot parse '" + text + "'");
        }
        if (used != text.size() || !(v > 0.0))
            throw UsageError("--snrs: values must be > 0 or 'inf', got '" + text + "'");
        return v;
    }

    template <class T>
    std::vector<T> parse_list(const std::vector<std::string>& tokens, const char* flag, T (*convert)(const std::string&)) {
        std::vector<T> out;
        for (const auto& token : tokens) {
            if (token.empty())
                continue;
            try {
                out.push_back(convert(token));
            } catch (const UsageError&) {
                throw;
            } catch (const std::exception&) {
                throw UsageError(std::string(flag) + ": cannot parse '" + token + "'");
            }
        }
        if (out.empty())
            throw UsageError(std::string(flag) + ": list must not be empty");
        return out;
    }

    double parse_wedge(const std::string& text) {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size() || !(v >= 0.0 && v < 180.0))
            throw UsageError("--wedges: values must be in [0, 180), got '" + text + "'");
        return v;
    }

    std::uint64_t parse_seed(const std::string& text) {
        std::size_t used = 0;
        if (!text.empty() && text[0] == '-')
            throw UsageError("--seeds: seeds must be non-negative, got '" + text + "'");
        const auto v = std::stoull(text, &used);
        if (used != text.size())
            throw UsageError("--seeds: cannot parse '" + text + "'");
        return v;
    }

    std::string joined_invocation(int argc, char** argv) {
        std::string out = "destripe";
        for (int i = 1; i < argc; ++i) {
            const std::string arg = argv[i];
            out += ' ';
            if (arg.empty() || arg.find_first_of(" \t\"'") != std::string::npos)
                out += '\'' + arg + '\'';
            else
                out += arg;
        }
        return out;
    }

    std::string preview_path(const std::string& prefix, const char* suffix) { return prefix + suffix + ".png"; }

    // ---- run ----

    struct RunOptions {
        std::string input;
        std::string output;
        std::string clean;
        std::string save_residual;
        std::string save_mask;
        std::string save_trace;
        bool rescale = false;
        WedgeFlags wedge;
        ReconFlags recon;
    };

    int cmd_run(const RunOptions& o) {
        const auto spec = o.wedge.spec();
        const auto params = o.recon.resolved();
        const auto observed = destripe::load(o.input);
        const auto mask = destripe::build_mask(spec, observed.width(), observed.height());
        const double fraction = destripe::deleted_fraction(mask);

        std::printf("deleted_fraction %.6f\n", fraction);
        if (fraction > 0.06)
            std::fprintf(stderr, "warning: wedge deletes %.2f%% of Fourier space (above 6%%); features may blur\n",
                         100.0 * fraction);
        if (mask.deleted_count() == 0)
            std::fprintf(stderr, "warning: wedge is empty, nothing was removed\n");

        const auto result = destripe::reconstruct(observed, mask, params);
        destripe::save(result.image, o.output, scaling_from(o.rescale));

        if (!o.save_residual.empty())
            destripe::save(destripe::residual(result.image, observed), o.save_residual, scaling_from(o.rescale));
        if (!o.save_mask.empty())
            destripe::save(destripe::centered_view(mask), o.save_mask);
        if (!o.save_trace.empty()) {
            std::ofstream out(o.save_trace);
            if (!out)
                throw destripe::IoError("cannot open '" + o.save_trace + "' for writing");
            destripe::write_trace_csv(out, result.trace);
        }
        if (!o.clean.empty()) {
            const auto clean = destripe::load(o.clean);
            const auto baseline = destripe::wedge_deleted(observed, mask);
            std::printf("rmse_recon %.6g\nrmse_wedge %.6g\nnormalized_rmse %.6g\n",
                        destripe::rmse(clean, result.image), destripe::rmse(clean, baseline),
                        destripe::normalized_rmse(clean, result.image, baseline));
        }
        return exit_ok;
    }

    // ---- synth ----

    struct SynthOptions {
        std::string kind = "rectangles";
        std::size_t width = 128;
        std::size_t height = 128;
        double stripe_angle = 90.0;
        double spread = 5.0;
        double amplitude = 0.2;
        double snr = 0.0;
        double interface_tilt = 0.0;
        std::uint64_t seed = 1;
        std::string prefix;
    };

    int cmd_synth(const SynthOptions& o) {
        const auto kind = destripe::parse_phantom_kind(o.kind);
        destripe::StripeSpec stripes{o.stripe_angle, o.spread, o.amplitude, destripe::derive_seed(o.seed, 1)};
        stripes.validate();

        const auto clean = destripe::make_phantom(kind, o.width, o.height, destripe::derive_seed(o.seed, 0),
                                                  o.interface_tilt);
        const auto field = destripe::make_stripe_field(stripes, o.width, o.height);
        auto corrupt = destripe::add(clean, field);
        if (o.snr > 0.0)
            corrupt = destripe::add_noise(corrupt, destripe::NoiseSpec{o.snr, destripe::derive_seed(o.seed, 2)});

        const auto write = [&](const destripe::ImageGrid& img, const char* suffix) {
            destripe::save(img, o.prefix + suffix + ".f32");
            destripe::save(img, preview_path(o.prefix, suffix), destripe::IntegerScaling::rescale);
        };
        write(clean, "_clean");
        write(field, "_stripes");
        write(corrupt, "_corrupt");

        const auto support = destripe::build_mask(stripes.support(), o.width, o.height);
        if (o.amplitude > 0.0)
            std::printf("stripe_out_of_wedge_energy %.3e\n", 1.0 - destripe::wedge_energy_fraction(field, support));
        else
            std::printf("stripe_out_of_wedge_energy %.3e\n", 0.0);
        return exit_ok;
    }

    // ---- eval ----

    struct EvalOptions {
        std::string clean;
        std::string recon;
        std::string observed;
        WedgeFlags wedge;
    };

    int cmd_eval(const EvalOptions& o) {
        const auto clean = destripe::load(o.clean);
        const auto recon = destripe::load(o.recon);
        const auto observed = destripe::load(o.observed);
        const auto mask = destripe::build_mask(o.wedge.spec(), observed.width(), observed.height());
        const auto baseline = destripe::wedge_deleted(observed, mask);
        std::printf("rmse_recon,rmse_wedge,normalized_rmse\n%.10g,%.10g,%.10g\n", destripe::rmse(clean, recon),
                    destripe::rmse(clean, baseline), destripe::normalized_rmse(clean, recon, baseline));
        return exit_ok;
    }

    // ---- sweep ----

    struct SweepOptions {
        std::vector<std::string> wedges;
        std::vector<std::string> snrs;
        std::vector<std::string> seeds;
        std::string phantom = "rectangles";
        std::size_t size = 128;
        double stripe_angle = 90.0;
        double amplitude = 0.2;
        std::size_t threads = 1;
        bool record_runtime = false;
        std::string output;
        ReconFlags recon;
    };

    int cmd_sweep(const SweepOptions& o, const std::string& invocation) {
        destripe::SweepConfig cfg;
        cfg.wedges_deg = parse_list<double>(o.wedges, "--wedges", parse_wedge);
        cfg.snrs = parse_list<double>(o.snrs, "--snrs", parse_snr);
        cfg.seeds = parse_list<std::uint64_t>(o.seeds, "--seeds", parse_seed);
        cfg.phantom = destripe::parse_phantom_kind(o.phantom);
        cfg.size = o.size;
        cfg.stripe_angle_deg = o.stripe_angle;
        cfg.stripe_amplitude = o.amplitude;
        cfg.recon = o.recon.resolved();
        cfg.threads = o.threads;
        cfg.record_runtime = o.record_runtime;
        cfg.validate();

        const auto rows = destripe::run_sweep(cfg);
        std::ofstream out(o.output, std::ios::binary | std::ios::trunc);
        if (!out)
            throw destripe::IoError("cannot open '" + o.output + "' for writing");
        destripe::write_sweep_csv(out, rows, cfg.record_runtime, invocation);
        out.close();
        if (!out)
            throw destripe::IoError("failed writing '" + o.output + "'");

        bool diverged = false;
        for (const auto& row : rows)
            diverged = diverged || row.diverged;
        if (diverged) {
            std::fprintf(stderr, "error: at least one sweep cell diverged, see status column\n");
            return exit_diverged;
        }
        return exit_ok;
    }

    // ---- mask ----

    struct MaskOptions {
        std::size_t width = 256;
        std::size_t height = 256;
        std::string output;
        WedgeFlags wedge;
    };

    int cmd_mask(const MaskOptions& o) {
        const auto mask = destripe::build_mask(o.wedge.spec(), o.width, o.height);
        destripe::save(destripe::centered_view(mask), o.output);
        std::printf("deleted_fraction %.6f\n", destripe::deleted_fraction(mask));
        return exit_ok;
    }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Remove directional stripe artifacts by deleting a Fourier wedge and refilling it with "
                 "total-variation minimization."};
    app.footer(angle_help);
    app.require_subcommand(1);

    RunOptions run;
    auto* run_cmd = app.add_subcommand("run", "Destripe an image");
    run_cmd->add_option("input", run.input, "Input image (.png, .pgm, .f32)")->required();
    run_cmd->add_option("output", run.output, "Output image (.png, .pgm, .f32)")->required();
    run_cmd->add_option("--clean", run.clean, "Ground truth, reports normalized RMSE when given");
    run_cmd->add_option("--save-residual", run.save_residual, "Write |output - input|");
    run_cmd->add_option("--save-mask", run.save_mask, "Write the centred keep mask as a PNG");
    run_cmd->add_option("--save-trace", run.save_trace, "Write the per-iteration trace as CSV");
    run_cmd->add_flag("--rescale", run.rescale, "Min-max rescale when writing integer formats (default clamps)");
    run.wedge.add_to(*run_cmd);
    run.recon.add_to(*run_cmd);
    run_cmd->footer(angle_help);

    SynthOptions synth;
    auto* synth_cmd = app.add_subcommand("synth", "Synthesize a phantom, a stripe field and a corrupted image");
    synth_cmd->add_option("--kind", synth.kind, "rectangles, disks or interface")
        ->check(CLI::IsMember({"rectangles", "disks", "interface"}))
        ->capture_default_str();
    synth_cmd->add_option("--width", synth.width, "Width in pixels, >= 16")->check(CLI::Range(16, 1 << 15));
    synth_cmd->add_option("--height", synth.height, "Height in pixels, >= 16")->check(CLI::Range(16, 1 << 15));
    synth_cmd->add_option("--stripe-angle", synth.stripe_angle, "Stripe direction in degrees, [0, 180)")
        ->check(CLI::Range(0.0, 179.999999999))
        ->capture_default_str();
    synth_cmd->add_option("--spread", synth.spread, "Angular spread of the stripe spectrum in degrees")
        ->check(CLI::Range(0.0, 179.999999999))
        ->capture_default_str();
    synth_cmd->add_option("--amplitude", synth.amplitude, "RMS amplitude of the stripe field")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    synth_cmd->add_option("--snr", synth.snr, "Add Gaussian noise with sigma = mean/snr (omit for none)")
        ->check(CLI::PositiveNumber);
    synth_cmd->add_option("--interface-tilt", synth.interface_tilt,
                          "Tilt of the interface phantom boundary from vertical, degrees")
        ->check(CLI::Range(-89.0, 89.0));
    synth_cmd->add_option("--seed", synth.seed, "Random seed")->capture_default_str();
    synth_cmd->add_option("--out-prefix", synth.prefix, "Output prefix")->required();
    synth_cmd->footer(angle_help);

    EvalOptions eval;
    auto* eval_cmd = app.add_subcommand("eval", "Score a reconstruction against ground truth");
    eval_cmd->add_option("--clean", eval.clean, "Ground truth image")->required();
    eval_cmd->add_option("--recon", eval.recon, "Reconstructed image")->required();
    eval_cmd->add_option("--observed", eval.observed, "Corrupted input image")->required();
    eval.wedge.add_to(*eval_cmd);

    SweepOptions sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run the wedge x SNR x seed study on a phantom");
    sweep_cmd->add_option("--wedges", sweep.wedges, "Wedge widths in degrees")->delimiter(',');
    sweep_cmd->add_option("--snrs", sweep.snrs, "SNR values, 'inf' for noiseless")->delimiter(',');
    sweep_cmd->add_option("--seeds", sweep.seeds, "Seeds")->delimiter(',');
    sweep_cmd->add_option("--phantom", sweep.phantom, "rectangles, disks or interface")
        ->check(CLI::IsMember({"rectangles", "disks", "interface"}))
        ->capture_default_str();
    sweep_cmd->add_option("--size", sweep.size, "Phantom side length")->check(CLI::Range(16, 1 << 13))->capture_default_str();
    sweep_cmd->add_option("--stripe-angle", sweep.stripe_angle, "Stripe direction in degrees, [0, 180)")
        ->check(CLI::Range(0.0, 179.999999999))
        ->capture_default_str();
    sweep_cmd->add_option("--amplitude", sweep.amplitude, "RMS amplitude of the stripe field")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    sweep_cmd->add_option("--threads", sweep.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    sweep_cmd->add_flag("--record-runtime", sweep.record_runtime, "Fill the runtime_s column (breaks byte stability)");
    sweep_cmd->add_option("-o,--output", sweep.output, "CSV output path")->required();
    sweep.recon.add_to(*sweep_cmd);

    MaskOptions mask;
    auto* mask_cmd = app.add_subcommand("mask", "Write the wedge mask as a PNG");
    mask_cmd->add_option("--width", mask.width, "Width in pixels")->check(CLI::Range(2, 1 << 15))->capture_default_str();
    mask_cmd->add_option("--height", mask.height, "Height in pixels")->check(CLI::Range(2, 1 << 15))->capture_default_str();
    mask_cmd->add_option("-o,--output", mask.output, "PNG output path")->required();
    mask.wedge.add_to(*mask_cmd);
    mask_cmd->footer(angle_help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (*run_cmd)
            return cmd_run(run);
        if (*synth_cmd)
            return cmd_synth(synth);
        if (*eval_cmd)
            return cmd_eval(eval);
        if (*sweep_cmd)
            return cmd_sweep(sweep, joined_invocation(argc, argv));
        if (*mask_cmd)
            return cmd_mask(mask);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_usage;
    } catch (const destripe::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_io;
    } catch (const destripe::DivergenceError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_diverged;
    } catch (const destripe::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_usage;
    }
    return exit_usage;
}
