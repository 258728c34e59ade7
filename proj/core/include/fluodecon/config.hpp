#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fluodecon/deconv.hpp"
#include "fluodecon/image.hpp"
#include "fluodecon/metrics.hpp"
#include "fluodecon/psf_models.hpp"
#include "fluodecon/simcep.hpp"

namespace fluodecon {

inline constexpr const char* kToolkitVersion = "0.1.0";

/// Everything a run needs, parseable from one config file and overridable by
/// CLI flags; echoed verbatim into output manifests so a run can be
/// reproduced from its own artifacts.
struct RunConfig {
    // [run]
    std::uint64_t seed = 1;
    int threads = 1;
    std::string out_dir = "out";

    // [phantom] (phantom.seed is taken from run.seed at execution time)
    PhantomConfig phantom;

    // [psf] — a nonempty path wins over the synthetic model
    std::string psf_path;
    PsfModel psf_model;

    // [deconvolve]
    std::string input_path;
    std::string ground_truth_path;
    Method method = Method::MapD;
    DeconvParams params;
    BoundaryPolicy boundary = BoundaryPolicy::Reflect;

    // [evaluate]
    std::string test_path;
    std::string reference_path;
    int metric_channel = 0;
    std::optional<Rect> signal_region;
    std::optional<Rect> background_region;
    std::vector<LineSegment> profiles;
    bool normalize_profiles = true;

    // [benchmark] (iteration count comes from deconvolve.iterations)
    int bench_width = 800;
    int bench_height = 800;
    int bench_channels = 3;
    std::vector<Method> bench_methods = {Method::LucyRichardson, Method::MapHunt, Method::MapD};
};

/// Applies "key = value" lines from a sectioned config file. Unknown keys,
/// unknown sections and malformed values are hard errors carrying file:line.
void apply_config_file(RunConfig& config, const std::string& path);

/// Applies a single dotted-key assignment ("deconvolve.lambda", "0.2").
/// Throws ConfigError on unknown keys or bad values.
void apply_config_entry(RunConfig& config, const std::string& dotted_key,
                        const std::string& value);

/// Full config echo in the same file format, preceded by a header comment
/// naming the subcommand. Output is loadable by apply_config_file.
void write_manifest(std::ostream& os, const RunConfig& config, const std::string& command);

BoundaryPolicy boundary_from_name(const std::string& name);  // reflect | replicate | zero
std::string boundary_name(BoundaryPolicy boundary);

Rect parse_rect(const std::string& text);            // "x,y,width,height"
LineSegment parse_segment(const std::string& text);  // "x0,y0,x1,y1"

}  // namespace fluodecon
