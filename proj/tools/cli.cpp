#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "thz/beam.hpp"
#include "thz/deblur.hpp"
#include "thz/denoise.hpp"
#include "thz/digest.hpp"
#include "thz/error.hpp"
#include "thz/forward_model.hpp"
#include "thz/io.hpp"
#include "thz/metrics.hpp"
#include "thz/parallel.hpp"
#include "thz/pipeline.hpp"
#include "thz/subspace.hpp"

namespace thz::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

// ---------------------------------------------------------------- parsing

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    return out;
}

double parse_double(const std::string& s) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        fail(ErrorKind::Configuration, "not a number: '" + s + "'");
    }
}

int parse_int(const std::string& s) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        fail(ErrorKind::Configuration, "not an integer: '" + s + "'");
    }
}

std::pair<double, double> parse_pair(const std::string& s) {
    const auto parts = split(s, ':');
    if (parts.size() == 1) return {parse_double(parts[0]), parse_double(parts[0])};
    if (parts.size() != 2) fail(ErrorKind::Configuration, "expected 'a' or 'a:b', got '" + s + "'");
    return {parse_double(parts[0]), parse_double(parts[1])};
}

std::vector<double> parse_doubles(const std::string& s) {
    std::vector<double> out;
    for (const auto& p : split(s, ',')) out.push_back(parse_double(p));
    return out;
}

std::vector<int> parse_ints(const std::string& s) {
    std::vector<int> out;
    for (const auto& p : split(s, ',')) out.push_back(parse_int(p));
    return out;
}

std::optional<int> parse_dimension(const std::string& s) {
    if (s == "auto" || s == "AUTO") return std::nullopt;
    return parse_int(s);
}

// ---------------------------------------------------------------- reporting

std::string file_digest(const fs::path& path) { return hex64(fnv1a64(io::read_bytes(path))); }

json file_entry(const fs::path& path) { return json{{"path", path.string()}, {"fnv1a64", file_digest(path)}}; }

class RunReport {
public:
    explicit RunReport(std::string subcommand) { doc_["subcommand"] = std::move(subcommand); }

    json& config() { return doc_["config"]; }
    json& doc() { return doc_; }
    void input(const fs::path& p) { doc_["inputs"].push_back(file_entry(p)); }
    void output(const fs::path& p) { doc_["outputs"].push_back(file_entry(p)); }
    void timing(const std::string& stage, double seconds) { doc_["timings"][stage] = seconds; }

    void restoration(const pipeline::RestorationReport& r) {
        doc_["p"] = r.p;
        doc_["noise_sigma_per_band"] = r.noise_sigma_per_band;
        json comps = json::array();
        for (const auto& c : r.components)
            comps.push_back({{"index", c.info.index},
                             {"effective_frequency_thz", c.info.effective_frequency},
                             {"w0_mm", c.w0},
                             {"energy_fraction", c.info.energy_fraction},
                             {"edge_score", c.info.edge_score},
                             {"noise_sigma", c.noise_sigma},
                             {"denoise_sigma", c.denoise_sigma},
                             {"discarded", c.discarded}});
        doc_["components"] = comps;
        for (const auto& [stage, secs] : r.timings) timing(stage, secs);
    }

    void write(const fs::path& path) const { io::write_text(path, doc_.dump(2) + "\n"); }

private:
    json doc_ = json::object();
};

fs::path sidecar_for(const fs::path& output, const std::string& explicit_path) {
    if (!explicit_path.empty()) return explicit_path;
    fs::path p = output;
    p += ".json";
    return p;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorKind::Io, "cannot create directory " + dir.string() + ": " + ec.message());
}

std::string band_png_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "band_%03d.png", index);
    return buf;
}

// ---------------------------------------------------------------- shared option groups

struct RestoreOptions {
    std::string p = "auto";
    std::string noise = "iid";
    double gain = 1.0;
    std::string deblur = "rl";
    int iterations = 20;
    double nsr = -1.0;
    double lambda_reg = 5e-4;
    double alpha = 2.0 / 3.0;
    int outer = 4;
    double f_number = 4.0;
    std::string psf_scale = "auto";
    std::string discard;
    int patch = 7;
    int window = 21;
    double h_factor = 0.55;
    double truncation = beam::kDefaultTruncation;
    std::uint64_t seed = 0;

    void add_subspace(CLI::App* app) {
        app->add_option("--p", p, "Subspace dimension or 'auto'")->capture_default_str();
        app->add_option("--noise", noise, "Noise type: iid | noniid | poisson")->capture_default_str();
        app->add_option("--gain", gain, "Poisson gain (counts scale)")->capture_default_str();
        app->add_option("--patch", patch, "Denoiser patch size (odd)")->capture_default_str();
        app->add_option("--window", window, "Denoiser search window (odd)")->capture_default_str();
        app->add_option("--h-factor", h_factor, "Denoiser strength as a multiple of sigma * patch")->capture_default_str();
    }

    void add_deblur(CLI::App* app) {
        app->add_option("--deblur", deblur, "Deblurring method: rl | wiener | hyplap")->capture_default_str();
        app->add_option("--iterations", iterations, "Richardson-Lucy iterations")->capture_default_str();
        app->add_option("--nsr", nsr, "Wiener noise-to-signal ratio (negative = from noise estimate)")
            ->capture_default_str();
        app->add_option("--lambda", lambda_reg, "Hyper-Laplacian prior weight")->capture_default_str();
        app->add_option("--alpha", alpha, "Hyper-Laplacian exponent (0.5 or 0.6667)")->capture_default_str();
        app->add_option("--outer", outer, "Hyper-Laplacian continuation steps")->capture_default_str();
        app->add_option("--f-number", f_number, "Focal length over aperture diameter of the optics")
            ->capture_default_str();
        app->add_option("--truncation", truncation, "PSF truncation radius in beam radii")->capture_default_str();
    }

    deblur::DeblurMethod method() const {
        deblur::DeblurMethod m;
        m.variant = deblur::deblur_variant_from_string(deblur);
        m.iterations = iterations;
        if (nsr >= 0.0) m.nsr = nsr;
        // Accept the rounded spelling of 2/3 on the command line.
        m.alpha = std::abs(alpha - 2.0 / 3.0) < 1e-3 ? 2.0 / 3.0 : alpha;
        m.lambda_reg = lambda_reg;
        m.outer_iterations = outer;
        m.validate();
        return m;
    }

    pipeline::RestorationConfig config(unsigned workers) const {
        pipeline::RestorationConfig c;
        c.p = parse_dimension(p);
        c.noise_type = pipeline::noise_type_from_string(noise);
        c.poisson_gain = gain;
        c.deblur = method();
        c.psf_geometry = beam::BeamGeometry::from_f_number(f_number);
        if (psf_scale == "auto") {
            c.psf_scale_mode = pipeline::PsfScaleMode::EffectiveFrequency;
        } else if (psf_scale.rfind("manual:", 0) == 0) {
            c.psf_scale_mode = pipeline::PsfScaleMode::Manual;
            c.manual_w0 = parse_doubles(psf_scale.substr(7));
        } else {
            fail(ErrorKind::Configuration, "--psf-scale must be 'auto' or 'manual:w0,w0,...'");
        }
        if (!discard.empty()) c.components_to_discard = parse_ints(discard);
        c.denoise_params.patch_size = patch;
        c.denoise_params.search_window = window;
        c.denoise_params.h_factor = h_factor;
        c.psf_truncation = truncation;
        c.workers = workers;
        return c;
    }

    json echo(const std::string& method_name) const {
        return json{{"method", method_name}, {"p", p},           {"noise_type", noise},    {"poisson_gain", gain},
                    {"deblur", deblur},      {"iterations", iterations}, {"nsr", nsr},     {"lambda_reg", lambda_reg},
                    {"alpha", alpha},        {"outer_iterations", outer}, {"f_number", f_number},
                    {"psf_scale", psf_scale}, {"components_to_discard", discard}, {"patch_size", patch},
                    {"search_window", window}, {"h_factor", h_factor}, {"psf_truncation", truncation},
                    {"seed", seed}};
    }
};

// ---------------------------------------------------------------- subcommands

struct SimulateCmd {
    std::string phantom = "disk_hole";
    int ny = 64, nx = 64;
    double step = 0.2;
    int bands = 30;
    double f_min = 0.3, f_max = 3.0;
    std::string frequencies;
    std::string bg = "1", fg = "0";
    double radius = 0.0, feature_width = 4.0;
    double f_number = 4.0, z = 0.0, truncation = beam::kDefaultTruncation;
    std::string noise = "iid";
    std::string sigma = "0.05";
    double gain = 1.0;
    std::uint64_t seed = 0;
    std::string clean, degraded, report;

    void add(CLI::App& app) {
        auto* c = app.add_subcommand("simulate", "Generate a phantom cube and its blurred, noisy observation");
        c->add_option("--phantom", phantom, "disk_hole | rings | bars")->capture_default_str();
        c->add_option("--ny", ny, "Rows")->capture_default_str();
        c->add_option("--nx", nx, "Columns")->capture_default_str();
        c->add_option("--step", step, "Pixel step in mm")->capture_default_str();
        c->add_option("--bands", bands, "Number of bands")->capture_default_str();
        c->add_option("--f-min", f_min, "Lowest frequency (THz)")->capture_default_str();
        c->add_option("--f-max", f_max, "Highest frequency (THz)")->capture_default_str();
        c->add_option("--frequencies", frequencies, "Explicit comma-separated frequency axis (THz)");
        c->add_option("--bg", bg, "Background amplitude 'a' or ramp 'a:b'")->capture_default_str();
        c->add_option("--fg", fg, "Foreground amplitude 'a' or ramp 'a:b'")->capture_default_str();
        c->add_option("--radius", radius, "Disk/ring radius in pixels (0 = size/4)")->capture_default_str();
        c->add_option("--feature-width", feature_width, "Ring or bar width in pixels")->capture_default_str();
        c->add_option("--f-number", f_number, "Focal length over aperture diameter")->capture_default_str();
        c->add_option("--z", z, "Sample plane offset from focus (mm)")->capture_default_str();
        c->add_option("--truncation", truncation, "PSF truncation radius in beam radii")->capture_default_str();
        c->add_option("--noise", noise, "iid | noniid | poisson")->capture_default_str();
        c->add_option("--sigma", sigma, "Noise sigma; 'a:b' ramp over bands for noniid")->capture_default_str();
        c->add_option("--gain", gain, "Poisson gain")->capture_default_str();
        c->add_option("--seed", seed, "Random seed")->capture_default_str();
        c->add_option("--clean", clean, "Output path of the clean cube")->required();
        c->add_option("--degraded", degraded, "Output path of the degraded cube")->required();
        c->add_option("--report", report, "JSON sidecar path (default <degraded>.json)");
    }

    int run(unsigned workers) const {
        forward::PhantomSpec spec;
        spec.kind = forward::phantom_kind_from_string(phantom);
        spec.ny = ny;
        spec.nx = nx;
        spec.step = step;
        spec.frequencies = frequencies.empty() ? forward::linear_frequencies(f_min, f_max, bands) : parse_doubles(frequencies);
        const auto [bg_lo, bg_hi] = parse_pair(bg);
        const auto [fg_lo, fg_hi] = parse_pair(fg);
        spec.background = {bg_lo, bg_hi};
        spec.foreground = {fg_lo, fg_hi};
        spec.radius_px = radius;
        spec.feature_width_px = feature_width;

        forward::NoiseModel model;
        const int b = static_cast<int>(spec.frequencies.size());
        if (noise == "iid") {
            model = forward::NoiseModel::gaussian_iid(parse_double(sigma), seed);
        } else if (noise == "noniid") {
            const auto [s_lo, s_hi] = parse_pair(sigma);
            std::vector<double> sigmas(b);
            for (int i = 0; i < b; ++i) sigmas[i] = b == 1 ? s_lo : s_lo + (s_hi - s_lo) * i / (b - 1);
            model = forward::NoiseModel::gaussian_noniid(std::move(sigmas), seed);
        } else if (noise == "poisson") {
            model = forward::NoiseModel::poisson(gain, seed);
        } else {
            fail(ErrorKind::Configuration, "unknown noise type: " + noise);
        }
        const auto geom = beam::BeamGeometry::from_f_number(f_number);

        const auto t0 = std::chrono::steady_clock::now();
        const HyperCube clean_cube = forward::generate_phantom(spec);
        const HyperCube blurred = forward::blur_cube(clean_cube, geom, z, workers, truncation);
        const HyperCube degraded_cube = forward::add_noise(blurred, model, workers);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        io::write_cube(clean_cube, clean);
        io::write_cube(degraded_cube, degraded);

        RunReport rep("simulate");
        rep.config() = json{{"phantom", {{"kind", phantom},
                                         {"ny", ny},
                                         {"nx", nx},
                                         {"step_mm", step},
                                         {"frequencies_thz", spec.frequencies},
                                         {"background", {bg_lo, bg_hi}},
                                         {"foreground", {fg_lo, fg_hi}},
                                         {"radius_px", radius},
                                         {"feature_width_px", feature_width}}},
                            {"geometry", {{"focal_length_mm", geom.focal_length},
                                          {"aperture_diameter_mm", geom.aperture_diameter},
                                          {"z_mm", z},
                                          {"truncation", truncation}}},
                            {"noise", {{"variant", forward::to_string(model.variant)},
                                       {"sigma", model.sigma},
                                       {"sigma_per_band", model.sigma_per_band},
                                       {"gain", model.gain}}},
                            {"seed", seed}};
        rep.timing("simulate", secs);
        rep.output(clean);
        rep.output(degraded);
        rep.write(sidecar_for(degraded, report));
        return kExitOk;
    }
};

struct AnalyzeCmd {
    std::string input, csv, png_dir, report;
    RestoreOptions opts;

    void add(CLI::App& app) {
        auto* c = app.add_subcommand("analyze", "Subspace component report and eigen-image panel");
        c->add_option("-i,--input", input, "Input cube")->required();
        c->add_option("--csv", csv, "Component report CSV")->required();
        c->add_option("--png-dir", png_dir, "Directory for eigen-image PNGs");
        c->add_option("--report", report, "JSON sidecar path (default <csv>.json)");
        opts.add_subspace(c);
    }

    int run(unsigned workers) const {
        const HyperCube cube = io::read_cube(input);
        const auto analysis = pipeline::analyze(cube, opts.config(workers));
        const auto& basis = analysis.basis;
        const auto& eigen = analysis.eigen;

        io::CsvTable table;
        table.header = {"component", "energy_fraction", "effective_frequency_thz", "w0_mm", "edge_score"};
        for (const auto& c : analysis.report.components)
            table.add_row({std::to_string(c.info.index), io::format_number(c.info.energy_fraction),
                           io::format_number(c.info.effective_frequency), io::format_number(c.w0),
                           io::format_number(c.info.edge_score)});
        table.write(csv);

        RunReport rep("analyze");
        rep.config() = opts.echo("analyze");
        rep.restoration(analysis.report);
        rep.doc()["eigenvalues"] = basis.eigenvalues;
        rep.input(input);
        rep.output(csv);
        if (!png_dir.empty()) {
            ensure_dir(png_dir);
            for (int k = 0; k < basis.p(); ++k) {
                char name[32];
                std::snprintf(name, sizeof name, "component_%02d.png", k);
                const fs::path path = fs::path(png_dir) / name;
                const Image img = eigen.image(k);
                io::write_png_gray(path, img.nx, img.ny, io::normalize_to_gray8(img));
                rep.output(path);
            }
        }
        rep.write(sidecar_for(csv, report));
        return kExitOk;
    }
};

struct DeblurCmd {
    std::string input, output, png_dir, report;
    double z = 0.0;
    RestoreOptions opts;

    void add(CLI::App& app) {
        auto* c = app.add_subcommand("deblur", "Band-by-band non-blind deconvolution with the beam PSF");
        c->add_option("-i,--input", input, "Input cube")->required();
        c->add_option("-o,--output", output, "Output cube")->required();
        c->add_option("--z", z, "Sample plane offset from focus (mm)")->capture_default_str();
        c->add_option("--png-dir", png_dir, "Directory for per-band PNGs");
        c->add_option("--report", report, "JSON sidecar path (default <output>.json)");
        opts.add_deblur(c);
    }

    int run(unsigned workers) const {
        const HyperCube cube = io::read_cube(input);
        if (cube.step_x() != cube.step_y())
            fail(ErrorKind::Configuration, "anisotropic pixel steps are not supported by the beam PSF");
        const auto method = opts.method();
        const auto geom = beam::BeamGeometry::from_f_number(opts.f_number);
        std::vector<double> sigma(cube.bands(), 0.0);
        if (method.variant == deblur::DeblurMethod::Variant::Wiener && !method.nsr && cube.bands() >= 3)
            sigma = subspace::estimate_noise(cube).sigma_per_band;

        const auto t0 = std::chrono::steady_clock::now();
        std::vector<Image> bands(cube.bands());
        parallel_for(bands.size(), workers, [&](std::size_t b) {
            const auto psf = beam::synthesize_psf(cube.frequencies()[b], geom, cube.step_x(), z, opts.truncation);
            bands[b] = deblur::deblur_image(cube.band_image(static_cast<int>(b)), psf, method, sigma[b]);
        });
        const HyperCube out = HyperCube::from_bands(cube.geometry(), bands);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        io::write_cube(out, output);

        RunReport rep("deblur");
        rep.config() = opts.echo("band_by_band");
        rep.config()["z_mm"] = z;
        rep.timing("deblur", secs);
        rep.input(input);
        rep.output(output);
        if (!png_dir.empty()) {
            ensure_dir(png_dir);
            for (int b = 0; b < out.bands(); ++b) {
                const fs::path path = fs::path(png_dir) / band_png_name(b);
                io::export_band(out, b, path);
                rep.output(path);
            }
        }
        rep.write(sidecar_for(output, report));
        return kExitOk;
    }
};

struct RestoreCmd {
    std::string name;
    std::string input, output, report;
    std::string method = "joint";
    RestoreOptions opts;

    void add(CLI::App& app, bool full) {
        auto* c = full ? app.add_subcommand("restore", "Subspace restoration: FastHyDe denoising or joint deblur+denoise")
                       : app.add_subcommand("denoise", "FastHyDe subspace denoising (no deblurring)");
        name = full ? "restore" : "denoise";
        c->add_option("-i,--input", input, "Input cube")->required();
        c->add_option("-o,--output", output, "Output cube")->required();
        c->add_option("--report", report, "JSON sidecar path (default <output>.json)");
        c->add_option("--seed", opts.seed, "Seed echoed into the run report")->capture_default_str();
        opts.add_subspace(c);
        if (full) {
            c->add_option("--method", method, "fasthyde | joint")->capture_default_str();
            opts.add_deblur(c);
            c->add_option("--psf-scale", opts.psf_scale, "auto | manual:w0,w0,... (mm)")->capture_default_str();
            c->add_option("--discard", opts.discard, "Comma-separated component indices to drop");
        } else {
            method = "fasthyde";
        }
    }

    int run(unsigned workers) const {
        if (method != "fasthyde" && method != "joint")
            fail(ErrorKind::Configuration, "--method must be fasthyde or joint");
        const auto cfg = opts.config(workers);
        const HyperCube cube = io::read_cube(input);
        const auto result = method == "joint" ? pipeline::joint_restore_detailed(cube, cfg)
                                              : pipeline::fasthyde_detailed(cube, cfg);
        io::write_cube(result.cube, output);
        RunReport rep(name);
        rep.config() = opts.echo(method);
        rep.restoration(result.report);
        rep.input(input);
        rep.output(output);
        rep.write(sidecar_for(output, report));
        return kExitOk;
    }
};

struct MetricsCmd {
    std::string input, reference, roi, row, col, span, csv;

    void add(CLI::App& app) {
        auto* c = app.add_subcommand("metrics", "Per-band flat-region std, feature sharpness and MSE/PSNR as CSV");
        c->add_option("-i,--input", input, "Cube to evaluate")->required();
        c->add_option("--reference", reference, "Reference cube for MSE/PSNR");
        c->add_option("--roi", roi, "Flat region x0,y0,width,height in mm");
        c->add_option("--row", row, "Row index of the sharpness cross-section");
        c->add_option("--col", col, "Column index of the sharpness cross-section");
        c->add_option("--span", span, "Pixel span 'begin:end' of the cross-section");
        c->add_option("--csv", csv, "Output CSV")->required();
    }

    int run(unsigned) const {
        const HyperCube cube = io::read_cube(input);
        io::CsvTable table;
        table.header = {"band", "frequency_thz"};
        std::vector<std::vector<std::string>> cols;

        std::optional<metrics::BandStd> stds;
        if (!roi.empty()) {
            const auto v = parse_doubles(roi);
            if (v.size() != 4) fail(ErrorKind::Configuration, "--roi expects x0,y0,width,height");
            stds = metrics::flat_region_std(cube, {v[0], v[1], v[2], v[3]});
            table.header.insert(table.header.end(), {"flat_std", "log10_flat_std"});
        }
        std::optional<std::vector<metrics::Sharpness>> sharp;
        if (!row.empty() || !col.empty()) {
            if (!row.empty() && !col.empty()) fail(ErrorKind::Configuration, "give either --row or --col");
            metrics::CrossSection cs;
            cs.axis = row.empty() ? metrics::CrossSection::Axis::Column : metrics::CrossSection::Axis::Row;
            cs.index = parse_int(row.empty() ? col : row);
            if (!span.empty()) {
                const auto parts = split(span, ':');
                if (parts.size() != 2) fail(ErrorKind::Configuration, "--span expects begin:end");
                cs.begin = parse_int(parts[0]);
                cs.end = parse_int(parts[1]);
            }
            sharp = metrics::feature_sharpness(cube, cs);
            table.header.insert(table.header.end(), {"sharpness_mm", "sharpness_reliable"});
        }
        std::optional<metrics::MsePsnr> err;
        if (!reference.empty()) {
            err = metrics::mse_psnr(cube, io::read_cube(reference));
            table.header.insert(table.header.end(), {"mse", "psnr_db"});
        }
        for (int b = 0; b < cube.bands(); ++b) {
            std::vector<std::string> r{std::to_string(b), io::format_number(cube.frequencies()[b])};
            if (stds) {
                r.push_back(io::format_number(stds->std_dev[b]));
                r.push_back(io::format_number(stds->log10_std[b]));
            }
            if (sharp) {
                const auto& s = (*sharp)[b];
                r.push_back(s.distance_mm ? io::format_number(*s.distance_mm) : "");
                r.push_back(s.reliable ? "1" : "0");
            }
            if (err) {
                r.push_back(io::format_number(err->per_band[b].mse));
                r.push_back(io::format_number(metrics::capped_psnr(err->per_band[b].psnr)));
            }
            table.add_row(std::move(r));
        }
        table.write(csv);
        return kExitOk;
    }
};

struct FalseColorCmd {
    std::string input, output, red = "0.4:0.8", green = "1.7:2.1", blue = "4.5:5.5";

    void add(CLI::App& app) {
        auto* c = app.add_subcommand("falsecolor", "RGB composite of integrated amplitude over three frequency ranges");
        c->add_option("-i,--input", input, "Input cube")->required();
        c->add_option("-o,--output", output, "Output PNG")->required();
        c->add_option("--red", red, "Red range lo:hi (THz)")->capture_default_str();
        c->add_option("--green", green, "Green range lo:hi (THz)")->capture_default_str();
        c->add_option("--blue", blue, "Blue range lo:hi (THz)")->capture_default_str();
    }

    int run(unsigned) const {
        const HyperCube cube = io::read_cube(input);
        metrics::FalseColorRanges ranges;
        auto set = [](metrics::FrequencyRange& r, const std::string& s) {
            const auto [lo, hi] = parse_pair(s);
            r = {lo, hi};
        };
        set(ranges.red, red);
        set(ranges.green, green);
        set(ranges.blue, blue);
        const auto img = metrics::false_color(cube, ranges);
        io::write_png_rgb(output, img.width, img.height, img.rgb);
        const json j{{"red_thz", {ranges.red.lo, ranges.red.hi}},
                     {"green_thz", {ranges.green.lo, ranges.green.hi}},
                     {"blue_thz", {ranges.blue.lo, ranges.blue.hi}},
                     {"input", file_entry(input)},
                     {"output", file_entry(output)}};
        io::write_text(sidecar_for(output, ""), j.dump(2) + "\n");
        return kExitOk;
    }
};

struct ExportCmd {
    std::string input, output, all_dir;
    int band = -1;

    void add(CLI::App& app) {
        auto* c = app.add_subcommand("export", "Export bands as 8-bit grayscale PNG (per-band min-max)");
        c->add_option("-i,--input", input, "Input cube")->required();
        c->add_option("--band", band, "Band index");
        c->add_option("-o,--output", output, "Output PNG for --band");
        c->add_option("--all", all_dir, "Export every band into this directory");
    }

    int run(unsigned) const {
        const HyperCube cube = io::read_cube(input);
        if (!all_dir.empty()) {
            ensure_dir(all_dir);
            for (int b = 0; b < cube.bands(); ++b) io::export_band(cube, b, fs::path(all_dir) / band_png_name(b));
            return kExitOk;
        }
        if (output.empty()) fail(ErrorKind::Configuration, "export needs --band with -o, or --all");
        io::export_band(cube, band, output);
        return kExitOk;
    }
};

int report_error(const std::string& code, const std::string& message) {
    std::string line = message;
    for (char& ch : line)
        if (ch == '\n' || ch == '\r') ch = ' ';
    std::cerr << "thzr: " << code << ": " << line << '\n';
    return code == "E_IO" ? kExitIo : kExitValidation;
}

} // namespace

int dispatch(const std::vector<std::string>& args) {
    CLI::App app{"Terahertz hyperspectral cube simulation and restoration", "thzr"};
    app.require_subcommand(1);
    unsigned workers = 0;
    app.add_option("--workers", workers, "Worker threads (0 = THZ_WORKERS or hardware concurrency)");

    SimulateCmd simulate;
    AnalyzeCmd analyze;
    DeblurCmd deblur_cmd;
    RestoreCmd denoise_cmd, restore;
    MetricsCmd metrics_cmd;
    FalseColorCmd falsecolor;
    ExportCmd export_cmd;
    simulate.add(app);
    analyze.add(app);
    deblur_cmd.add(app);
    denoise_cmd.add(app, false);
    restore.add(app, true);
    metrics_cmd.add(app);
    falsecolor.add(app);
    export_cmd.add(app);
    for (auto* sub : app.get_subcommands({})) sub->add_option("--workers", workers, "Worker threads");

    std::vector<std::string> rev(args.begin() + (args.empty() ? 0 : 1), args.end());
    std::reverse(rev.begin(), rev.end());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            std::cout << app.help();
            return kExitOk;
        }
        return report_error("E_USAGE", e.what());
    }

    try {
        const std::string sub = app.get_subcommands().front()->get_name();
        if (workers == 0) workers = default_workers();
        if (sub == "simulate") return simulate.run(workers);
        if (sub == "analyze") return analyze.run(workers);
        if (sub == "deblur") return deblur_cmd.run(workers);
        if (sub == "denoise") return denoise_cmd.run(workers);
        if (sub == "restore") return restore.run(workers);
        if (sub == "metrics") return metrics_cmd.run(workers);
        if (sub == "falsecolor") return falsecolor.run(workers);
        if (sub == "export") return export_cmd.run(workers);
        return report_error("E_USAGE", "unknown subcommand " + sub);
    } catch (const Error& e) {
        return report_error(error_code(e.kind()), e.what());
    } catch (const std::exception& e) {
        return report_error("E_INTERNAL", e.what());
    }
}

} // namespace thz::cli
