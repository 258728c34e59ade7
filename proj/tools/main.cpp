// fluodecon: simulate | deconvolve | evaluate | benchmark
//
// Exit codes: 0 success, 1 usage/config error, 2 I/O error, 3 numerical
// failure (non-finite iterate).

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fluodecon/config.hpp"
#include "fluodecon/convolve.hpp"
#include "fluodecon/deconv.hpp"
#include "fluodecon/errors.hpp"
#include "fluodecon/expectation.hpp"
#include "fluodecon/image_io.hpp"
#include "fluodecon/metrics.hpp"
#include "fluodecon/psf_models.hpp"
#include "fluodecon/simcep.hpp"

namespace fs = std::filesystem;
using namespace fluodecon;

namespace {

// Raw flag values; only flags the user actually passed are applied, so they
// override the config file regardless of parse order.
struct Flags {
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> entries;  // dotted key -> value
};

void add_option(CLI::App* cmd, Flags& flags, const std::string& flag_name,
                const std::string& dotted_key, const std::string& desc) {
    cmd->add_option_function<std::string>(
           flag_name,
           [&flags, dotted_key](const std::string& v) { flags.entries.emplace_back(dotted_key, v); },
           desc)
        ->type_name("VALUE");
}

void add_shared_flags(CLI::App* cmd, Flags& flags) {
    cmd->add_option("--config", flags.config_path, "Config file (key = value with [sections])")
        ->type_name("PATH");
    add_option(cmd, flags, "--seed", "run.seed", "RNG seed");
    add_option(cmd, flags, "--threads", "run.threads", "Worker threads (0 = all cores)");
    add_option(cmd, flags, "--out", "run.out", "Output directory");
}

void add_psf_flags(CLI::App* cmd, Flags& flags) {
    add_option(cmd, flags, "--psf", "psf.path", "PSF file (matrix text, PGM or PNG)");
    add_option(cmd, flags, "--psf-model", "psf.model", "Synthetic PSF: gaussian|airy|disk");
    add_option(cmd, flags, "--psf-sigma", "psf.sigma", "Gaussian PSF sigma, pixels");
    add_option(cmd, flags, "--psf-airy-first-zero", "psf.airy_first_zero",
               "Airy first dark ring radius, pixels");
    add_option(cmd, flags, "--psf-disk-radius", "psf.disk_radius", "Disk PSF radius, pixels");
    add_option(cmd, flags, "--psf-support-radius", "psf.support_radius",
               "PSF support half-width, pixels");
}

void add_deconv_flags(CLI::App* cmd, Flags& flags) {
    add_option(cmd, flags, "--input", "deconvolve.input", "Measured image (PGM or PNG)");
    add_option(cmd, flags, "--ground-truth", "deconvolve.ground_truth",
               "Optional reference for per-iteration PSNR");
    add_option(cmd, flags, "--method", "deconvolve.method", "lr|map-hunt|map-d");
    add_option(cmd, flags, "--lambda", "deconvolve.lambda", "Relaxation weight");
    add_option(cmd, flags, "--beta", "deconvolve.beta", "Kernel bandwidth (1/intensity^2)");
    add_option(cmd, flags, "--window-radius", "deconvolve.window_radius",
               "Estimation window half-width (4 = 9x9)");
    add_option(cmd, flags, "--iterations", "deconvolve.iterations", "Iteration count");
    add_option(cmd, flags, "--epsilon", "deconvolve.epsilon", "Division floor");
    add_option(cmd, flags, "--boundary", "deconvolve.boundary", "reflect|replicate|zero");
}

RunConfig build_config(const Flags& flags) {
    RunConfig config;
    if (!flags.config_path.empty()) {
        apply_config_file(config, flags.config_path);
    }
    for (const auto& [key, value] : flags.entries) {
        apply_config_entry(config, key, value);
    }
    return config;
}

Psf resolve_psf(const RunConfig& config) {
    if (!config.psf_path.empty()) {
        return load_psf(config.psf_path);
    }
    std::string warning;
    Psf psf = render_psf(config.psf_model, &warning);
    if (!warning.empty()) {
        std::cerr << "warning: " << warning << "\n";
    }
    return psf;
}

fs::path prepare_out_dir(const RunConfig& config) {
    fs::path dir(config.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw IoError(config.out_dir + ": cannot create output directory (" + ec.message() + ")");
    }
    return dir;
}

void save_manifest(const fs::path& dir, const RunConfig& config, const std::string& command,
                   const std::vector<std::string>& notes = {}) {
    std::ofstream os(dir / "manifest.txt");
    if (!os) throw IoError((dir / "manifest.txt").string() + ": cannot write manifest");
    write_manifest(os, config, command);
    for (const std::string& note : notes) {
        os << "# " << note << "\n";
    }
}

int cmd_simulate(const RunConfig& config_in) {
    RunConfig config = config_in;
    config.phantom.seed = config.seed;
    const fs::path dir = prepare_out_dir(config);
    const Psf psf = resolve_psf(config);

    PhantomPair pair = make_pair(config.phantom, psf);
    write_png((dir / "ground_truth.png").string(), pair.ground_truth, 16);
    write_png((dir / "degraded.png").string(), pair.degraded, 16);
    write_matrix_text((dir / "psf.txt").string(),
                      Image(psf.width(), psf.height(), psf.data()));
    save_manifest(dir, config, "simulate");
    std::cout << "simulate: wrote " << config.phantom.width << "x" << config.phantom.height << "x"
              << pair.ground_truth.channel_count() << " pair to " << dir.string() << "\n";
    return 0;
}

int cmd_deconvolve(const RunConfig& config) {
    if (config.input_path.empty()) {
        throw ConfigError("deconvolve: no input image (set deconvolve.input or --input)");
    }
    const fs::path dir = prepare_out_dir(config);
    const LoadResult loaded = read_image(config.input_path);
    const Psf psf = resolve_psf(config);

    std::optional<LoadResult> truth;
    if (!config.ground_truth_path.empty()) {
        truth = read_image(config.ground_truth_path);
        if (truth->image.channel_count() != loaded.image.channel_count()) {
            throw ConfigError("deconvolve: ground truth channel count differs from input");
        }
    }

    std::vector<Image> outputs;
    std::size_t clipped = 0;
    for (int c = 0; c < loaded.image.channel_count(); ++c) {
        const Image* gt = truth ? &truth->image.channel(c) : nullptr;
        DeconvResult result = deconvolve(loaded.image.channel(c), psf, config.method,
                                         config.params, gt, config.threads, config.boundary);
        const std::string trace_name = "trace_" + loaded.image.channel_name(c) + ".csv";
        std::ofstream trace_os(dir / trace_name);
        if (!trace_os) throw IoError((dir / trace_name).string() + ": cannot write trace");
        result.trace.write_csv(trace_os);
        for (double v : result.image.data()) {
            if (v > 1.0) ++clipped;
        }
        outputs.push_back(std::move(result.image));
    }
    MultiChannelImage deconvolved(std::move(outputs), loaded.image.channel_names());
    write_png((dir / "deconvolved.png").string(), deconvolved, 16);

    save_manifest(dir, config, "deconvolve",
                  {"input_max_value = " + std::to_string(loaded.max_value),
                   "output_clipped_pixels = " + std::to_string(clipped)});
    std::cout << "deconvolve: method " << method_name(config.method) << ", "
              << config.params.iterations << " iterations, wrote " << dir.string()
              << "/deconvolved.png\n";
    return 0;
}

int cmd_evaluate(const RunConfig& config) {
    if (config.test_path.empty()) {
        throw ConfigError("evaluate: no test image (set evaluate.test or --test)");
    }
    const fs::path dir = prepare_out_dir(config);
    const LoadResult test = read_image(config.test_path);
    std::optional<LoadResult> reference;
    if (!config.reference_path.empty()) {
        reference = read_image(config.reference_path);
    }
    if (config.metric_channel < 0 || config.metric_channel >= test.image.channel_count()) {
        throw ConfigError("evaluate: channel " + std::to_string(config.metric_channel) +
                          " out of range");
    }
    const std::string label = fs::path(config.test_path).stem().string();

    std::vector<MetricReport> reports;
    for (int c = 0; c < test.image.channel_count(); ++c) {
        MetricReport report;
        report.method_label = label + ":" + test.image.channel_name(c);
        if (reference) {
            report.psnr_db = psnr(test.image.channel(c), reference->image.channel(c));
        }
        if (config.signal_region && config.background_region) {
            report.background_snr_db = background_snr(test.image.channel(c),
                                                      *config.background_region,
                                                      *config.signal_region);
        }
        if (config.signal_region) {
            report.contrast_value = contrast(test.image.channel(c), *config.signal_region);
        }
        reports.push_back(std::move(report));
    }
    if (reference && test.image.channel_count() > 1) {
        MetricReport joint;
        joint.method_label = label + ":all";
        joint.psnr_db = psnr(test.image, reference->image);
        reports.push_back(std::move(joint));
    }

    std::ofstream metrics_os(dir / "metrics.csv");
    if (!metrics_os) throw IoError((dir / "metrics.csv").string() + ": cannot write metrics");
    write_metrics_csv(metrics_os, reports);

    for (std::size_t i = 0; i < config.profiles.size(); ++i) {
        const auto samples = line_profile(test.image.channel(config.metric_channel),
                                          config.profiles[i], config.normalize_profiles);
        const std::string name = "profile_" + std::to_string(i) + ".csv";
        std::ofstream os(dir / name);
        if (!os) throw IoError((dir / name).string() + ": cannot write profile");
        write_profile_csv(os, samples);
    }

    save_manifest(dir, config, "evaluate");
    std::cout << "evaluate: wrote " << reports.size() << " metric rows and "
              << config.profiles.size() << " profiles to " << dir.string() << "\n";
    return 0;
}

int cmd_benchmark(const RunConfig& config_in) {
    RunConfig config = config_in;
    config.phantom.seed = config.seed;
    config.phantom.width = config.bench_width;
    config.phantom.height = config.bench_height;
    const fs::path dir = prepare_out_dir(config);
    const Psf psf = resolve_psf(config);

    PhantomPair pair = make_pair(config.phantom, psf);
    std::vector<Image> channels;
    for (int c = 0; c < config.bench_channels; ++c) {
        channels.push_back(pair.degraded.channel(c % pair.degraded.channel_count()));
    }
    const MultiChannelImage measured(std::move(channels));

    std::ofstream os(dir / "benchmark.csv");
    if (!os) throw IoError((dir / "benchmark.csv").string() + ": cannot write benchmark CSV");
    os << "method,width,height,channels,iterations,seconds\n";
    os.precision(6);
    for (Method method : config.bench_methods) {
        const auto t0 = std::chrono::steady_clock::now();
        deconvolve_multichannel(measured, psf, method, config.params, config.threads,
                                config.boundary);
        const double seconds = std::chrono::duration<double>(
            std::chrono::steady_clock::now() - t0).count();
        os << method_name(method) << ',' << config.bench_width << ',' << config.bench_height
           << ',' << config.bench_channels << ',' << config.params.iterations << ','
           << std::fixed << seconds << '\n';
        std::cout << "benchmark: " << method_name(method) << " " << config.bench_width << "x"
                  << config.bench_height << "x" << config.bench_channels << " ("
                  << config.params.iterations << " it): " << std::fixed << seconds << " s\n";
        std::cout.unsetf(std::ios::fixed);
    }
    save_manifest(dir, config, "benchmark");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deconvolution toolkit for fluorescence microscopy"};
    app.require_subcommand(1);

    Flags flags;
    CLI::App* simulate = app.add_subcommand(
        "simulate", "Generate a synthetic cell-population phantom pair");
    add_shared_flags(simulate, flags);
    add_psf_flags(simulate, flags);
    add_option(simulate, flags, "--width", "phantom.width", "Phantom width, pixels");
    add_option(simulate, flags, "--height", "phantom.height", "Phantom height, pixels");
    add_option(simulate, flags, "--cells", "phantom.cells", "Cell count");
    add_option(simulate, flags, "--structures-per-cell", "phantom.structures_per_cell",
               "Subcellular structures per cell");
    add_option(simulate, flags, "--allow-overlap", "phantom.allow_overlap", "true|false");
    add_option(simulate, flags, "--autofluorescence", "phantom.autofluorescence",
               "Background level added by the degradation model");
    add_option(simulate, flags, "--ccd-variance", "phantom.ccd_variance",
               "Gaussian read-noise variance");
    add_option(simulate, flags, "--photon-scale", "phantom.photon_scale",
               "Expected photons at unit intensity (inf = noiseless)");
    add_option(simulate, flags, "--cell-radius-min", "phantom.cell_radius_min",
               "Smallest cell semi-axis, pixels");
    add_option(simulate, flags, "--cell-radius-max", "phantom.cell_radius_max",
               "Largest cell semi-axis, pixels");

    CLI::App* deconv = app.add_subcommand("deconvolve", "Deconvolve a measured image");
    add_shared_flags(deconv, flags);
    add_psf_flags(deconv, flags);
    add_deconv_flags(deconv, flags);

    CLI::App* evaluate = app.add_subcommand("evaluate", "Image-quality metrics and line profiles");
    add_shared_flags(evaluate, flags);
    add_option(evaluate, flags, "--test", "evaluate.test", "Image under evaluation");
    add_option(evaluate, flags, "--reference", "evaluate.reference",
               "Ground-truth reference (enables PSNR)");
    add_option(evaluate, flags, "--channel", "evaluate.channel",
               "Channel for regions and profiles");
    add_option(evaluate, flags, "--signal-region", "evaluate.signal_region", "x,y,width,height");
    add_option(evaluate, flags, "--background-region", "evaluate.background_region",
               "x,y,width,height");
    add_option(evaluate, flags, "--profiles", "evaluate.profiles",
               "Segments \"x0,y0,x1,y1; x0,y0,x1,y1; ...\"");
    add_option(evaluate, flags, "--normalize-profiles", "evaluate.normalize_profiles",
               "true|false");

    CLI::App* benchmark = app.add_subcommand("benchmark", "Wall-clock timing per method");
    add_shared_flags(benchmark, flags);
    add_psf_flags(benchmark, flags);
    add_deconv_flags(benchmark, flags);
    add_option(benchmark, flags, "--bench-width", "benchmark.width", "Benchmark image width");
    add_option(benchmark, flags, "--bench-height", "benchmark.height", "Benchmark image height");
    add_option(benchmark, flags, "--bench-channels", "benchmark.channels", "Channel count");
    add_option(benchmark, flags, "--methods", "benchmark.methods", "Comma-separated method list");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        const RunConfig config = build_config(flags);
        if (simulate->parsed()) return cmd_simulate(config);
        if (deconv->parsed()) return cmd_deconvolve(config);
        if (evaluate->parsed()) return cmd_evaluate(config);
        if (benchmark->parsed()) return cmd_benchmark(config);
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
