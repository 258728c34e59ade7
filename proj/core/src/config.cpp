#include "fluodecon/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "fluodecon/errors.hpp"

namespace fluodecon {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream in(s);
    while (std::getline(in, part, sep)) parts.push_back(trim(part));
    if (!s.empty() && s.back() == sep) parts.push_back("");
    return parts;
}

long long parse_int(const std::string& v) {
    std::size_t used = 0;
    long long out = 0;
    try {
        out = std::stoll(v, &used);
    } catch (const std::exception&) {
        throw ConfigError("expected an integer, got '" + v + "'");
    }
    if (used != v.size()) throw ConfigError("expected an integer, got '" + v + "'");
    return out;
}

std::uint64_t parse_u64(const std::string& v) {
    std::size_t used = 0;
    unsigned long long out = 0;
    try {
        out = std::stoull(v, &used);
    } catch (const std::exception&) {
        throw ConfigError("expected an unsigned integer, got '" + v + "'");
    }
    if (used != v.size()) throw ConfigError("expected an unsigned integer, got '" + v + "'");
    return out;
}

double parse_double(const std::string& v) {
    if (v == "inf") return std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception&) {
        throw ConfigError("expected a number, got '" + v + "'");
    }
    if (used != v.size()) throw ConfigError("expected a number, got '" + v + "'");
    return out;
}

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("expected true/false, got '" + v + "'");
}

std::vector<double> parse_numbers(const std::string& text, std::size_t n, const char* what) {
    const auto parts = split(text, ',');
    if (parts.size() != n) {
        throw ConfigError(std::string(what) + ": expected " + std::to_string(n) +
                          " comma-separated values, got '" + text + "'");
    }
    std::vector<double> out;
    for (const auto& p : parts) out.push_back(parse_double(p));
    return out;
}

}  // namespace

Rect parse_rect(const std::string& text) {
    const auto v = parse_numbers(text, 4, "region");
    return Rect{static_cast<int>(v[0]), static_cast<int>(v[1]), static_cast<int>(v[2]),
                static_cast<int>(v[3])};
}

LineSegment parse_segment(const std::string& text) {
    const auto v = parse_numbers(text, 4, "segment");
    return LineSegment{v[0], v[1], v[2], v[3]};
}

BoundaryPolicy boundary_from_name(const std::string& name) {
    if (name == "reflect") return BoundaryPolicy::Reflect;
    if (name == "replicate") return BoundaryPolicy::Replicate;
    if (name == "zero") return BoundaryPolicy::ZeroPad;
    throw ConfigError("unknown boundary '" + name + "' (expected reflect, replicate or zero)");
}

std::string boundary_name(BoundaryPolicy boundary) {
    switch (boundary) {
        case BoundaryPolicy::Reflect: return "reflect";
        case BoundaryPolicy::Replicate: return "replicate";
        case BoundaryPolicy::ZeroPad: return "zero";
    }
    return "?";
}

void apply_config_entry(RunConfig& c, const std::string& key, const std::string& value) {
    try {
        // [run]
        if (key == "run.seed") { c.seed = parse_u64(value); return; }
        if (key == "run.threads") { c.threads = static_cast<int>(parse_int(value)); return; }
        if (key == "run.out") { c.out_dir = value; return; }
        if (key == "run.version") { return; }  // informational echo in manifests
        // [phantom]
        if (key == "phantom.width") { c.phantom.width = static_cast<int>(parse_int(value)); return; }
        if (key == "phantom.height") { c.phantom.height = static_cast<int>(parse_int(value)); return; }
        if (key == "phantom.cells") { c.phantom.cell_count = static_cast<int>(parse_int(value)); return; }
        if (key == "phantom.structures_per_cell") {
            c.phantom.structures_per_cell = static_cast<int>(parse_int(value));
            return;
        }
        if (key == "phantom.allow_overlap") { c.phantom.allow_overlap = parse_bool(value); return; }
        if (key == "phantom.autofluorescence") { c.phantom.autofluorescence = parse_double(value); return; }
        if (key == "phantom.ccd_variance") { c.phantom.ccd_variance = parse_double(value); return; }
        if (key == "phantom.photon_scale") { c.phantom.photon_scale = parse_double(value); return; }
        if (key == "phantom.cell_radius_min") { c.phantom.cell_radius_min = parse_double(value); return; }
        if (key == "phantom.cell_radius_max") { c.phantom.cell_radius_max = parse_double(value); return; }
        // [psf]
        if (key == "psf.path") { c.psf_path = value; return; }
        if (key == "psf.model") { c.psf_model.kind = psf_kind_from_name(value); return; }
        if (key == "psf.sigma") { c.psf_model.sigma = parse_double(value); return; }
        if (key == "psf.airy_first_zero") { c.psf_model.first_zero_radius = parse_double(value); return; }
        if (key == "psf.disk_radius") { c.psf_model.disk_radius = parse_double(value); return; }
        if (key == "psf.support_radius") {
            c.psf_model.support_radius = static_cast<int>(parse_int(value));
            return;
        }
        // [deconvolve]
        if (key == "deconvolve.input") { c.input_path = value; return; }
        if (key == "deconvolve.ground_truth") { c.ground_truth_path = value; return; }
        if (key == "deconvolve.method") { c.method = method_from_name(value); return; }
        if (key == "deconvolve.lambda") { c.params.lambda = parse_double(value); return; }
        if (key == "deconvolve.beta") { c.params.beta = parse_double(value); return; }
        if (key == "deconvolve.window_radius") {
            c.params.window_radius = static_cast<int>(parse_int(value));
            return;
        }
        if (key == "deconvolve.iterations") {
            c.params.iterations = static_cast<int>(parse_int(value));
            return;
        }
        if (key == "deconvolve.epsilon") { c.params.epsilon = parse_double(value); return; }
        if (key == "deconvolve.boundary") { c.boundary = boundary_from_name(value); return; }
        // [evaluate]
        if (key == "evaluate.test") { c.test_path = value; return; }
        if (key == "evaluate.reference") { c.reference_path = value; return; }
        if (key == "evaluate.channel") { c.metric_channel = static_cast<int>(parse_int(value)); return; }
        if (key == "evaluate.signal_region") {
            c.signal_region = value.empty() ? std::nullopt : std::optional<Rect>(parse_rect(value));
            return;
        }
        if (key == "evaluate.background_region") {
            c.background_region =
                value.empty() ? std::nullopt : std::optional<Rect>(parse_rect(value));
            return;
        }
        if (key == "evaluate.profiles") {
            c.profiles.clear();
            if (!value.empty()) {
                for (const auto& part : split(value, ';')) {
                    if (!part.empty()) c.profiles.push_back(parse_segment(part));
                }
            }
            return;
        }
        if (key == "evaluate.normalize_profiles") { c.normalize_profiles = parse_bool(value); return; }
        // [benchmark]
        if (key == "benchmark.width") { c.bench_width = static_cast<int>(parse_int(value)); return; }
        if (key == "benchmark.height") { c.bench_height = static_cast<int>(parse_int(value)); return; }
        if (key == "benchmark.channels") { c.bench_channels = static_cast<int>(parse_int(value)); return; }
        if (key == "benchmark.methods") {
            c.bench_methods.clear();
            for (const auto& part : split(value, ',')) {
                c.bench_methods.push_back(method_from_name(part));
            }
            if (c.bench_methods.empty()) throw ConfigError("benchmark.methods: empty list");
            return;
        }
    } catch (const ConfigError& e) {
        throw ConfigError(key + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(key + ": " + e.what());
    }
    throw ConfigError("unknown config key '" + key + "'");
}

void apply_config_file(RunConfig& config, const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError(path + ": cannot open config file");
    }
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[') {
            if (t.back() != ']' || t.size() < 3) {
                throw ConfigError(path + ":" + std::to_string(lineno) + ": malformed section header '" +
                                  t + "'");
            }
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 'key = value', got '" +
                              t + "'");
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
        }
        const std::string dotted = section.empty() ? key : section + "." + key;
        try {
            apply_config_entry(config, dotted, value);
        } catch (const ConfigError& e) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

namespace {

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

void write_manifest(std::ostream& os, const RunConfig& c, const std::string& command) {
    os << "# fluodecon " << kToolkitVersion << " manifest for '" << command << "'\n";
    os << "# re-run: fluodecon " << command << " --config <this file>\n\n";
    os << "[run]\n";
    os << "version = " << kToolkitVersion << "\n";
    os << "seed = " << c.seed << "\n";
    os << "threads = " << c.threads << "\n";
    os << "out = " << c.out_dir << "\n\n";

    os << "[phantom]\n";
    os << "width = " << c.phantom.width << "\n";
    os << "height = " << c.phantom.height << "\n";
    os << "cells = " << c.phantom.cell_count << "\n";
    os << "structures_per_cell = " << c.phantom.structures_per_cell << "\n";
    os << "allow_overlap = " << (c.phantom.allow_overlap ? "true" : "false") << "\n";
    os << "autofluorescence = " << format_double(c.phantom.autofluorescence) << "\n";
    os << "ccd_variance = " << format_double(c.phantom.ccd_variance) << "\n";
    os << "photon_scale = " << format_double(c.phantom.photon_scale) << "\n";
    os << "cell_radius_min = " << format_double(c.phantom.cell_radius_min) << "\n";
    os << "cell_radius_max = " << format_double(c.phantom.cell_radius_max) << "\n\n";

    os << "[psf]\n";
    os << "path = " << c.psf_path << "\n";
    os << "model = " << psf_kind_name(c.psf_model.kind) << "\n";
    os << "sigma = " << format_double(c.psf_model.sigma) << "\n";
    os << "airy_first_zero = " << format_double(c.psf_model.first_zero_radius) << "\n";
    os << "disk_radius = " << format_double(c.psf_model.disk_radius) << "\n";
    os << "support_radius = " << c.psf_model.support_radius << "\n\n";

    os << "[deconvolve]\n";
    os << "input = " << c.input_path << "\n";
    os << "ground_truth = " << c.ground_truth_path << "\n";
    os << "method = " << method_name(c.method) << "\n";
    os << "lambda = " << format_double(c.params.lambda) << "\n";
    os << "beta = " << format_double(c.params.beta) << "\n";
    os << "window_radius = " << c.params.window_radius << "\n";
    os << "iterations = " << c.params.iterations << "\n";
    os << "epsilon = " << format_double(c.params.epsilon) << "\n";
    os << "boundary = " << boundary_name(c.boundary) << "\n\n";

    os << "[evaluate]\n";
    os << "test = " << c.test_path << "\n";
    os << "reference = " << c.reference_path << "\n";
    os << "channel = " << c.metric_channel << "\n";
    os << "signal_region = ";
    if (c.signal_region) {
        os << c.signal_region->x << ',' << c.signal_region->y << ',' << c.signal_region->width
           << ',' << c.signal_region->height;
    }
    os << "\n";
    os << "background_region = ";
    if (c.background_region) {
        os << c.background_region->x << ',' << c.background_region->y << ','
           << c.background_region->width << ',' << c.background_region->height;
    }
    os << "\n";
    os << "profiles = ";
    for (std::size_t i = 0; i < c.profiles.size(); ++i) {
        const LineSegment& s = c.profiles[i];
        if (i > 0) os << "; ";
        os << format_double(s.x0) << ',' << format_double(s.y0) << ',' << format_double(s.x1)
           << ',' << format_double(s.y1);
    }
    os << "\n";
    os << "normalize_profiles = " << (c.normalize_profiles ? "true" : "false") << "\n\n";

    os << "[benchmark]\n";
    os << "width = " << c.bench_width << "\n";
    os << "height = " << c.bench_height << "\n";
    os << "channels = " << c.bench_channels << "\n";
    os << "methods = ";
    for (std::size_t i = 0; i < c.bench_methods.size(); ++i) {
        if (i > 0) os << ",";
        os << method_name(c.bench_methods[i]);
    }
    os << "\n";
}

}  // namespace fluodecon
