/**********
 *   Copyright 2026 The polarbm3d authors
 *
 *   Licensed under the Apache License, Version 2.0 (the "License");
 *   you may not use this file except in compliance with the License.
 *   You may obtain a copy of the License at
 *
 *       http://www.apache.org/licenses/LICENSE-2.0
 *
 *   Unless required by applicable law or agreed to in writing, software
 *   distributed under the License is distributed on an "AS IS" BASIS,
 *   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *   See the License for the specific language governing permissions and
 *   limitations under the License.
\**********/
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pbm3d/error.hpp"
#include "pbm3d/fixtures.hpp"
#include "pbm3d/io.hpp"
#include "pbm3d/metrics.hpp"
#include "pbm3d/noise.hpp"
#include "pbm3d/optimizer.hpp"
#include "pbm3d/pbm3d.hpp"
#include "pbm3d/presets.hpp"

namespace fs = std::filesystem;
using namespace pbm3d;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitNonConvergence = 4;

struct NamedImage {
    std::string id;
    CameraImage image;
};

// --in accepts either one manifest path or three plane paths
std::vector<NamedImage> load_inputs(const std::vector<std::string>& paths) {
    std::vector<NamedImage> out;
    if (paths.size() == 3) {
        NamedImage ni;
        ni.id = fs::path(paths[0]).stem().string();
        if (ni.id.size() > 3 && ni.id.ends_with("_i0")) ni.id.resize(ni.id.size() - 3);
        ni.image = load_triple(paths[0], paths[1], paths[2]);
        out.push_back(std::move(ni));
        return out;
    }
    if (paths.size() != 1)
        throw ValidationError("--in expects one manifest path or three plane paths");
    const DatasetManifest man = DatasetManifest::load(paths[0]);
    if (man.entries.empty()) throw ValidationError("manifest has no entries");
    for (const ManifestEntry& e : man.entries) out.push_back({e.id, load_triple(e)});
    return out;
}

ChannelTransform resolve_matrix(const std::string& spec, std::string& label) {
    for (const std::string& name : preset_names()) {
        if (spec == name) {
            label = name;
            double dev = 0.0;
            ChannelTransform t = preset_transform(spec, &dev);
            if (dev > 1e-6)
                std::cerr << "note: preset '" << spec << "' rows deviate from unit L1 by " << dev
                          << "; renormalized\n";
            return t;
        }
    }
    label = fs::path(spec).stem().string();
    const Mat3 m = load_matrix(spec);
    if (max_row_l1_deviation(m) > 1e-6)
        std::cerr << "note: matrix file rows deviate from unit L1 by " << max_row_l1_deviation(m)
                  << "; renormalized\n";
    return normalize_rows(m);
}

void append_report(const fs::path& path, const std::vector<EvalReport>& reports) {
    if (path.empty()) return;
    std::ofstream out(path, std::ios::app);
    if (!out) throw IoError("cannot write report: " + path.string());
    for (const EvalReport& r : reports) out << to_record_line(r) << "\n";
}

// ------------------------------------------------------------ subcommands

int cmd_denoise(const std::vector<std::string>& in, double sigma, const std::string& method_name,
                const std::string& matrix_spec, const std::string& out_dir,
                const std::string& format_name, bool clip, unsigned threads) {
    const EvalMethod method = parse_method(method_name);
    const PlaneFormat format = parse_plane_format(format_name);
    DenoiseProfile profile;
    std::string label;
    ChannelTransform t;
    if (method == EvalMethod::Pbm3d) t = resolve_matrix(matrix_spec, label);

    for (const NamedImage& ni : load_inputs(in)) {
        CameraImage result;
        switch (method) {
            case EvalMethod::Pbm3d:
                result = denoise_polarization(ni.image, {t, profile, sigma}, threads);
                break;
            case EvalMethod::Bm3dPerChannel:
                result = denoise_per_channel(ni.image, sigma, profile, threads);
                break;
            case EvalMethod::Bm3dStokes:
                result = denoise_stokes(ni.image, sigma, profile, threads);
                break;
            case EvalMethod::None:
                result = ni.image;
                break;
        }
        const auto paths = save_triple(result, fs::path(out_dir) / ni.id, format, clip);
        std::cout << ni.id << " -> " << paths[0].string() << " (+i45,+i90)\n";
    }
    return 0;
}

int cmd_add_noise(const std::vector<std::string>& in, double sigma, uint64_t seed,
                  const std::string& out_dir, const std::string& format_name, bool clip) {
    const PlaneFormat format = parse_plane_format(format_name);
    size_t index = 0;
    for (const NamedImage& ni : load_inputs(in)) {
        const NoiseSpec spec{sigma, derive_seed(seed, 0xA0, index++)};
        const CameraImage noisy = add_noise(ni.image, spec);
        const auto paths = save_triple(noisy, fs::path(out_dir) / ni.id, format, clip);
        std::cout << ni.id << " seed=" << spec.seed << " -> " << paths[0].string() << "\n";
    }
    return 0;
}

int cmd_evaluate(const std::vector<std::string>& noisy_in, const std::vector<std::string>& truth_in,
                 const std::string& method_name, double sigma, const std::string& matrix_spec,
                 uint64_t seed, const std::string& report_path, unsigned threads) {
    const EvalMethod method = parse_method(method_name);
    std::vector<NamedImage> noisy = load_inputs(noisy_in);
    std::vector<NamedImage> truth;
    if (!truth_in.empty()) {
        truth = load_inputs(truth_in);
    } else if (noisy_in.size() == 1) {
        // fall back to truth paths recorded in the manifest
        const DatasetManifest man = DatasetManifest::load(noisy_in[0]);
        for (const ManifestEntry& e : man.entries) {
            if (!e.has_truth())
                throw ValidationError("entry " + e.id + " has no truth planes; pass --truth");
            truth.push_back({e.id, load_triple(*e.truth_i0, *e.truth_i45, *e.truth_i90)});
        }
    } else {
        throw ValidationError("--truth is required when --noisy is a bare triple");
    }
    if (noisy.size() != truth.size())
        throw ValidationError("noisy and truth sets differ in size");

    EvalParams params;
    params.sigma = sigma;
    params.seed = seed;
    params.threads = threads;
    if (method == EvalMethod::Pbm3d) {
        std::string label;
        params.matrix = resolve_matrix(matrix_spec, label);
        params.matrix_label = label;
    }

    std::vector<EvalReport> reports;
    for (size_t i = 0; i < noisy.size(); ++i) {
        params.image_id = noisy[i].id;
        EvalReport r = evaluate_method(noisy[i].image, truth[i].image, method, params);
        reports.push_back(r);
        std::cout << to_record_line(r) << "\n";
    }
    append_report(report_path, reports);
    return 0;
}

int cmd_benchmark(const std::string& manifest_path, std::vector<double> sigmas,
                  std::vector<std::string> methods, const std::string& matrix_spec, uint64_t seed,
                  const std::string& report_path, unsigned threads) {
    if (sigmas.empty()) throw ValidationError("--sigmas must list at least one value");
    if (methods.empty()) methods = {"bm3d-per-channel", "bm3d-stokes", "pbm3d"};

    const DatasetManifest man = DatasetManifest::load(manifest_path);
    if (man.entries.empty()) throw ValidationError("manifest has no entries");
    std::vector<NamedImage> clean;
    for (const ManifestEntry& e : man.entries) clean.push_back({e.id, load_triple(e)});

    std::string matrix_label;
    const ChannelTransform matrix = resolve_matrix(matrix_spec, matrix_label);

    std::vector<EvalReport> all;
    for (size_t si = 0; si < sigmas.size(); ++si) {
        const double sigma = sigmas[si];
        // one noisy realization per (image, sigma), shared by all methods
        std::vector<NamedImage> noisy;
        std::vector<uint64_t> seeds;
        for (size_t ii = 0; ii < clean.size(); ++ii) {
            const uint64_t s = derive_seed(seed, ii, si);
            seeds.push_back(s);
            noisy.push_back({clean[ii].id, add_noise(clean[ii].image, {sigma, s})});
        }

        std::vector<std::vector<EvalReport>> grid(methods.size());
        for (size_t mi = 0; mi < methods.size(); ++mi) {
            const EvalMethod method = parse_method(methods[mi]);
            for (size_t ii = 0; ii < clean.size(); ++ii) {
                EvalParams params;
                params.sigma = sigma;
                params.seed = seeds[ii];
                params.image_id = clean[ii].id;
                params.threads = threads;
                if (method == EvalMethod::Pbm3d) {
                    params.matrix = matrix;
                    params.matrix_label = matrix_label;
                }
                grid[mi].push_back(evaluate_method(noisy[ii].image, clean[ii].image, method, params));
            }
        }

        std::printf("\nsigma = %g  (PSNR dB)\n", sigma);
        std::printf("%-16s", "image");
        for (const std::string& m : methods) std::printf(" %16s", m.c_str());
        std::printf("\n");
        for (size_t ii = 0; ii < clean.size(); ++ii) {
            std::printf("%-16s", clean[ii].id.c_str());
            for (size_t mi = 0; mi < methods.size(); ++mi)
                std::printf(" %16.2f", grid[mi][ii].psnr_db);
            std::printf("\n");
        }
        std::printf("%-16s", "mean");
        for (size_t mi = 0; mi < methods.size(); ++mi) {
            double s = 0.0;
            for (const EvalReport& r : grid[mi]) s += r.psnr_db;
            std::printf(" %16.2f", s / static_cast<double>(grid[mi].size()));
        }
        std::printf("\n");

        for (const auto& col : grid) all.insert(all.end(), col.begin(), col.end());
    }
    append_report(report_path, all);
    return 0;
}

int cmd_optimize(const std::string& manifest_path, double sigma, const std::string& algo,
                 int budget, double delta, uint64_t seed, const std::string& out_path, int crop,
                 const std::string& t0_spec, unsigned threads) {
    const DatasetManifest man = DatasetManifest::load(manifest_path);
    if (man.entries.empty()) throw ValidationError("manifest has no entries");

    OptimizationRun run;
    run.sigma = sigma;
    run.seed = seed;
    run.budget = budget;
    run.delta = delta;
    run.threads = threads;
    for (const ManifestEntry& e : man.entries) {
        CameraImage img = load_triple(e);
        if (crop > 0 && (img.width() > crop || img.height() > crop)) {
            const int size = std::min({crop, img.width(), img.height()});
            const int r0 = (img.height() - size) / 2;
            const int c0 = (img.width() - size) / 2;
            CameraImage cropped{Plane(size, size), Plane(size, size), Plane(size, size)};
            for (int p = 0; p < 3; ++p)
                for (int r = 0; r < size; ++r)
                    for (int c = 0; c < size; ++c)
                        cropped.plane(p).at(r, c) = img.plane(p).at(r0 + r, c0 + c);
            img = std::move(cropped);
        }
        run.dataset.push_back(std::move(img));
    }

    SearchResult result;
    if (algo == "monte-carlo") {
        result = monte_carlo_search(run);
    } else if (algo == "pattern") {
        std::string label;
        const ChannelTransform t0 = resolve_matrix(t0_spec, label);
        result = pattern_search(run, t0);
    } else {
        throw LookupError("unknown --algo: " + algo);
    }

    save_matrix(result.transform.matrix(), out_path);
    std::printf("algo=%s evaluations=%ld iterations=%d objective=%.8g -> %s\n", algo.c_str(),
                result.evaluations, result.iterations, result.objective.mean_mse,
                out_path.c_str());
    if (!result.converged) {
        std::cerr << "warning: pattern search exhausted its budget before reaching a fixed point\n";
        return kExitNonConvergence;
    }
    return 0;
}

int cmd_bias_probe(double intensity, double sigma, int samples, uint64_t seed) {
    const double bias = dop_bias_probe(intensity, sigma, samples, seed);
    std::printf("intensity=%g sigma=%g samples=%d mean_dop_bias=%.8g\n", intensity, sigma, samples,
                bias);
    return 0;
}

int cmd_average(const std::vector<std::string>& in, const std::string& out_prefix,
                const std::string& format_name) {
    if (in.size() < 3 || in.size() % 3 != 0)
        throw ValidationError("--in expects plane paths in groups of three (i0 i45 i90 per frame)");
    std::vector<CameraImage> frames;
    for (size_t k = 0; k < in.size(); k += 3)
        frames.push_back(load_triple(in[k], in[k + 1], in[k + 2]));
    const CameraImage avg = average_frames(frames);
    const auto paths = save_triple(avg, out_prefix, parse_plane_format(format_name));
    std::cout << frames.size() << " frames -> " << paths[0].string() << " (+i45,+i90)\n";
    return 0;
}

int cmd_fixture(const std::string& kind_name, int size, uint64_t seed, const std::string& out_prefix,
                const std::string& format_name, const std::string& manifest_path) {
    const FixtureKind kind = parse_fixture_kind(kind_name);
    const CameraImage img = make_fixture(kind, size, seed);
    const auto paths = save_triple(img, out_prefix, parse_plane_format(format_name));
    std::cout << kind_name << " " << size << "x" << size << " seed=" << seed << " -> "
              << paths[0].string() << " (+i45,+i90)\n";
    if (!manifest_path.empty()) {
        DatasetManifest man;
        if (fs::exists(manifest_path)) man = DatasetManifest::load(manifest_path);
        ManifestEntry e;
        e.id = fs::path(out_prefix).filename().string();
        e.path_i0 = paths[0];
        e.path_i45 = paths[1];
        e.path_i90 = paths[2];
        man.entries.push_back(std::move(e));
        man.save(manifest_path);
        std::cout << "manifest updated: " << manifest_path << "\n";
    }
    return 0;
}

int cmd_render(const std::vector<std::string>& in, const std::string& out_dop,
               const std::string& out_aop, const std::string& format_name) {
    if (in.size() != 3) throw ValidationError("--in expects three plane paths");
    const CameraImage img = load_triple(in[0], in[1], in[2]);
    const StokesImage s = stokes_from_camera(img);
    const PlaneFormat format = parse_plane_format(format_name);

    if (!out_dop.empty()) {
        // black = DoP 0, white = DoP 0.5
        const PolarizationMaps maps = compute_dop(s);
        Plane img_out(maps.dop.width, maps.dop.height);
        for (size_t k = 0; k < img_out.data.size(); ++k)
            img_out.data[k] = maps.mask[k] ? std::clamp(maps.dop.data[k] / 0.5, 0.0, 1.0) : 0.0;
        save_plane(img_out, out_dop, format, true);
        std::cout << "dop -> " << out_dop << "\n";
    }
    if (!out_aop.empty()) {
        // cyclic gray ramp over the (-pi/2, pi/2] orientation period
        const PolarizationMaps maps = compute_aop(s);
        constexpr double pi = 3.14159265358979323846;
        Plane img_out(maps.aop.width, maps.aop.height);
        for (size_t k = 0; k < img_out.data.size(); ++k) {
            if (!maps.mask[k]) {
                img_out.data[k] = 0.0;
                continue;
            }
            double v = maps.aop.data[k] / pi + 0.5;  // (-pi/2, pi/2] -> (0, 1]
            v -= std::floor(v);
            img_out.data[k] = v;
        }
        save_plane(img_out, out_aop, format, true);
        std::cout << "aop -> " << out_aop << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"polarization-image denoising toolkit (PBM3D, baselines, evaluation)"};
    app.require_subcommand(1);

    unsigned threads = 0;
    app.add_option("--threads", threads, "worker threads (0 = all cores)");

    // denoise
    auto* den = app.add_subcommand("denoise", "denoise a triple or a whole manifest");
    std::vector<std::string> den_in;
    double den_sigma = 0.0;
    std::string den_method = "pbm3d", den_matrix = "opt-global", den_out, den_format = "pfm64";
    bool den_clip = false;
    den->add_option("--in", den_in, "manifest path or three plane paths")->required()->expected(1, 3);
    den->add_option("--sigma", den_sigma, "noise standard deviation")->required();
    den->add_option("--method", den_method, "pbm3d | bm3d | bm3d-stokes");
    den->add_option("--matrix", den_matrix, "preset name or matrix file (pbm3d only)");
    den->add_option("--out", den_out, "output directory")->required();
    den->add_option("--format", den_format, "pfm64 | pfm32 | pgm8 | pgm16");
    den->add_flag("--clip", den_clip, "clip to [0,1] for integer formats");

    // add-noise
    auto* add = app.add_subcommand("add-noise", "add seeded Gaussian noise");
    std::vector<std::string> add_in;
    double add_sigma = 0.0;
    uint64_t add_seed = 0;
    std::string add_out, add_format = "pfm64";
    add->add_option("--in", add_in, "manifest path or three plane paths")->required()->expected(1, 3);
    add->add_option("--sigma", add_sigma, "noise standard deviation")->required();
    add->add_option("--seed", add_seed, "rng seed");
    add->add_option("--out", add_out, "output directory")->required();
    add->add_option("--format", add_format, "pfm64 | pfm32 | pgm8 | pgm16");

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "PSNR/MSE report for one method");
    std::vector<std::string> ev_noisy, ev_truth;
    std::string ev_method, ev_matrix = "opt-global", ev_report;
    double ev_sigma = 0.0;
    uint64_t ev_seed = 0;
    ev->add_option("--noisy", ev_noisy, "manifest path or three plane paths")->required()->expected(1, 3);
    ev->add_option("--truth", ev_truth, "manifest path or three plane paths")->expected(1, 3);
    ev->add_option("--method", ev_method, "pbm3d | bm3d | bm3d-stokes | none")->required();
    ev->add_option("--sigma", ev_sigma, "noise standard deviation")->required();
    ev->add_option("--matrix", ev_matrix, "preset name or matrix file (pbm3d only)");
    ev->add_option("--seed", ev_seed, "seed recorded in the report");
    ev->add_option("--report", ev_report, "append records to this file");

    // benchmark
    auto* bench = app.add_subcommand("benchmark", "method x sigma PSNR grid over a manifest");
    std::string bench_manifest, bench_matrix = "opt-global", bench_report;
    std::vector<double> bench_sigmas;
    std::vector<std::string> bench_methods;
    uint64_t bench_seed = 0;
    bench->add_option("--manifest", bench_manifest, "manifest of noise-free triples")->required();
    bench->add_option("--sigmas", bench_sigmas, "noise levels")->required();
    bench->add_option("--methods", bench_methods, "subset of {bm3d-per-channel,bm3d-stokes,pbm3d,none}");
    bench->add_option("--matrix", bench_matrix, "pbm3d transform preset/file");
    bench->add_option("--seed", bench_seed, "base rng seed");
    bench->add_option("--report", bench_report, "append records to this file");

    // optimize
    auto* opt = app.add_subcommand("optimize", "estimate the optimal channel transform");
    std::string opt_manifest, opt_algo = "pattern", opt_out, opt_t0 = "opponent";
    double opt_sigma = 0.0, opt_delta = 0.01;
    int opt_budget = 50, opt_crop = 128;
    uint64_t opt_seed = 0;
    bool opt_full = false;
    opt->add_option("--manifest", opt_manifest, "manifest of noise-free triples")->required();
    opt->add_option("--sigma", opt_sigma, "noise standard deviation")->required();
    opt->add_option("--algo", opt_algo, "monte-carlo | pattern");
    opt->add_option("--budget", opt_budget, "rounds / max outer iterations");
    opt->add_option("--delta", opt_delta, "pattern-search interval");
    opt->add_option("--seed", opt_seed, "rng seed (noise realization, sampling)");
    opt->add_option("--out", opt_out, "output matrix file")->required();
    opt->add_option("--crop", opt_crop, "center-crop size for objective evaluations");
    opt->add_flag("--full-images", opt_full, "evaluate on full images (no crop)");
    opt->add_option("--t0", opt_t0, "pattern-search start: preset name or matrix file");

    // bias-probe
    auto* bias = app.add_subcommand("bias-probe", "mean DoP bias of an unpolarized pixel");
    double bias_intensity = 1.0, bias_sigma = 0.02;
    int bias_samples = 1000000;
    uint64_t bias_seed = 0;
    bias->add_option("--intensity", bias_intensity, "total intensity of the pixel")->required();
    bias->add_option("--sigma", bias_sigma, "noise standard deviation")->required();
    bias->add_option("--samples", bias_samples, "sample count");
    bias->add_option("--seed", bias_seed, "rng seed");

    // average
    auto* avg = app.add_subcommand("average", "average aligned frames into one triple");
    std::vector<std::string> avg_in;
    std::string avg_out, avg_format = "pfm64";
    avg->add_option("--in", avg_in, "plane paths, three per frame")->required();
    avg->add_option("--out", avg_out, "output triple prefix")->required();
    avg->add_option("--format", avg_format, "pfm64 | pfm32 | pgm8 | pgm16");

    // fixture
    auto* fix = app.add_subcommand("fixture", "generate a synthetic ground-truth triple");
    std::string fix_kind = "textured", fix_out, fix_format = "pfm64", fix_manifest;
    int fix_size = 256;
    uint64_t fix_seed = 1;
    fix->add_option("--kind", fix_kind, "uniform-dop | textured | unpolarized");
    fix->add_option("--size", fix_size, "square image size (>= 32)");
    fix->add_option("--seed", fix_seed, "scene seed");
    fix->add_option("--out", fix_out, "output triple prefix")->required();
    fix->add_option("--format", fix_format, "pfm64 | pfm32 | pgm8 | pgm16");
    fix->add_option("--manifest", fix_manifest, "append an entry to this manifest");

    // render
    auto* ren = app.add_subcommand("render", "render DoP / AoP maps");
    std::vector<std::string> ren_in;
    std::string ren_dop, ren_aop, ren_format = "pgm8";
    ren->add_option("--in", ren_in, "three plane paths")->required()->expected(3);
    ren->add_option("--out-dop", ren_dop, "DoP output (black=0, white=0.5)");
    ren->add_option("--out-aop", ren_aop, "AoP output (cyclic gray)");
    ren->add_option("--format", ren_format, "pgm8 | pgm16");

    CLI11_PARSE(app, argc, argv);

    try {
        if (den->parsed())
            return cmd_denoise(den_in, den_sigma, den_method, den_matrix, den_out, den_format,
                               den_clip, threads);
        if (add->parsed()) return cmd_add_noise(add_in, add_sigma, add_seed, add_out, add_format, false);
        if (ev->parsed())
            return cmd_evaluate(ev_noisy, ev_truth, ev_method, ev_sigma, ev_matrix, ev_seed,
                                ev_report, threads);
        if (bench->parsed())
            return cmd_benchmark(bench_manifest, bench_sigmas, bench_methods, bench_matrix,
                                 bench_seed, bench_report, threads);
        if (opt->parsed())
            return cmd_optimize(opt_manifest, opt_sigma, opt_algo, opt_budget, opt_delta, opt_seed,
                                opt_out, opt_full ? 0 : opt_crop, opt_t0, threads);
        if (bias->parsed()) return cmd_bias_probe(bias_intensity, bias_sigma, bias_samples, bias_seed);
        if (avg->parsed()) return cmd_average(avg_in, avg_out, avg_format);
        if (fix->parsed())
            return cmd_fixture(fix_kind, fix_size, fix_seed, fix_out, fix_format, fix_manifest);
        if (ren->parsed()) return cmd_render(ren_in, ren_dop, ren_aop, ren_format);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return 0;
}
