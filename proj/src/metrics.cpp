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
#include "pbm3d/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "pbm3d/error.hpp"
#include "pbm3d/pbm3d.hpp"
#include "pbm3d/presets.hpp"

namespace pbm3d {

namespace {

void fill_mse(EvalReport& r, const StokesImage& s, const StokesImage& truth) {
    s.validate();
    truth.validate();
    if (s.width() != truth.width() || s.height() != truth.height())
        throw StructuralError("mse_stokes: dimension mismatch");
    const size_t n = s.s0.size();
    double e0 = 0.0, e1 = 0.0, e2 = 0.0;
    for (size_t k = 0; k < n; ++k) {
        const double d0 = s.s0.data[k] - truth.s0.data[k];
        const double d1 = s.s1.data[k] - truth.s1.data[k];
        const double d2 = s.s2.data[k] - truth.s2.data[k];
        e0 += d0 * d0;
        e1 += d1 * d1;
        e2 += d2 * d2;
    }
    r.mse_s0 = e0 / static_cast<double>(n);
    r.mse_s1 = e1 / static_cast<double>(n);
    r.mse_s2 = e2 / static_cast<double>(n);
    r.mse = (e0 + 0.5 * e1 + 0.5 * e2) / (3.0 * static_cast<double>(n));
}

void fill_psnr(EvalReport& r) {
    if (r.mse == 0.0) {
        r.psnr_infinite = true;
        r.psnr_db = std::numeric_limits<double>::infinity();
    } else {
        r.psnr_infinite = false;
        r.psnr_db = 10.0 * std::log10(1.0 / r.mse);
    }
}

std::string fmt_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

EvalReport mse_stokes(const StokesImage& s, const StokesImage& truth) {
    EvalReport r;
    fill_mse(r, s, truth);
    fill_psnr(r);
    return r;
}

EvalReport psnr_stokes(const StokesImage& s, const StokesImage& truth) {
    return mse_stokes(s, truth);
}

StokesImage metric_stokes(const CameraImage& img) {
    StokesImage s = stokes_from_camera(img);
    for (int k = 0; k < 3; ++k)
        for (double& v : s.plane(k).data) v *= 0.5;
    return s;
}

EvalMethod parse_method(const std::string& name) {
    if (name == "pbm3d") return EvalMethod::Pbm3d;
    if (name == "bm3d-per-channel" || name == "bm3d") return EvalMethod::Bm3dPerChannel;
    if (name == "bm3d-stokes") return EvalMethod::Bm3dStokes;
    if (name == "none") return EvalMethod::None;
    throw LookupError("unknown method: " + name);
}

std::string method_name(EvalMethod m) {
    switch (m) {
        case EvalMethod::Pbm3d: return "pbm3d";
        case EvalMethod::Bm3dPerChannel: return "bm3d-per-channel";
        case EvalMethod::Bm3dStokes: return "bm3d-stokes";
        case EvalMethod::None: return "none";
    }
    throw LookupError("unknown method enum");
}

EvalReport evaluate_method(const CameraImage& noisy, const CameraImage& truth, EvalMethod method,
                           const EvalParams& params) {
    noisy.validate();
    truth.validate();
    if (noisy.width() != truth.width() || noisy.height() != truth.height())
        throw StructuralError("evaluate_method: noisy/truth dimension mismatch");

    CameraImage result;
    std::string matrix_label = "-";
    switch (method) {
        case EvalMethod::None:
            result = noisy;
            break;
        case EvalMethod::Bm3dPerChannel:
            result = denoise_per_channel(noisy, params.sigma, params.profile, params.threads);
            break;
        case EvalMethod::Bm3dStokes:
            result = denoise_stokes(noisy, params.sigma, params.profile, params.threads);
            matrix_label = "stokes";
            break;
        case EvalMethod::Pbm3d: {
            Pbm3dConfig cfg;
            if (params.matrix) {
                cfg.transform = *params.matrix;
                matrix_label = params.matrix_label.empty() ? "custom" : params.matrix_label;
            } else {
                cfg.transform = preset_transform("opt-global");
                matrix_label = "opt-global";
            }
            cfg.profile = params.profile;
            cfg.sigma = params.sigma;
            result = denoise_polarization(noisy, cfg, params.threads);
            break;
        }
    }

    EvalReport r = mse_stokes(metric_stokes(result), metric_stokes(truth));
    r.image_id = params.image_id;
    r.method = method_name(method);
    r.sigma = params.sigma;
    r.seed = params.seed;
    r.matrix_label = matrix_label;
    return r;
}

std::string to_record_line(const EvalReport& r) {
    std::ostringstream os;
    os << "image_id=" << (r.image_id.empty() ? "-" : r.image_id)
       << " method=" << (r.method.empty() ? "-" : r.method)
       << " sigma=" << fmt_double(r.sigma)
       << " seed=" << r.seed
       << " matrix=" << (r.matrix_label.empty() ? "-" : r.matrix_label)
       << " mse=" << fmt_double(r.mse)
       << " psnr_db=" << fmt_double(r.psnr_db)
       << " mse_s0=" << fmt_double(r.mse_s0)
       << " mse_s1=" << fmt_double(r.mse_s1)
       << " mse_s2=" << fmt_double(r.mse_s2);
    return os.str();
}

EvalReport parse_record_line(const std::string& line) {
    EvalReport r;
    std::istringstream is(line);
    std::string token;
    while (is >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos)
            throw ValidationError("bad record token: " + token);
        const std::string key = token.substr(0, eq);
        const std::string val = token.substr(eq + 1);
        if (key == "image_id") r.image_id = val;
        else if (key == "method") r.method = val;
        else if (key == "sigma") r.sigma = std::stod(val);
        else if (key == "seed") r.seed = std::stoull(val);
        else if (key == "matrix") r.matrix_label = val;
        else if (key == "mse") r.mse = std::stod(val);
        else if (key == "psnr_db") {
            if (val == "inf") {
                r.psnr_db = std::numeric_limits<double>::infinity();
                r.psnr_infinite = true;
            } else {
                r.psnr_db = std::stod(val);
            }
        }
        else if (key == "mse_s0") r.mse_s0 = std::stod(val);
        else if (key == "mse_s1") r.mse_s1 = std::stod(val);
        else if (key == "mse_s2") r.mse_s2 = std::stod(val);
        else throw ValidationError("unknown record field: " + key);
    }
    return r;
}

}  // namespace pbm3d
