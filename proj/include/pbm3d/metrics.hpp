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
#ifndef PBM3D_METRICS_HPP
#define PBM3D_METRICS_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "pbm3d/channel_transform.hpp"
#include "pbm3d/bm3d.hpp"
#include "pbm3d/image.hpp"

namespace pbm3d {

struct EvalReport {
    std::string image_id;
    std::string method;
    double sigma = 0.0;
    uint64_t seed = 0;
    std::string matrix_label = "-";
    double mse = 0.0;
    double psnr_db = 0.0;
    bool psnr_infinite = false;  // mse == 0
    double mse_s0 = 0.0;
    double mse_s1 = 0.0;
    double mse_s2 = 0.0;
};

// Stokes-weighted mean square error over planes of equal size:
//   (1/3MN) * sum( d0^2 + d1^2/2 + d2^2/2 )
EvalReport mse_stokes(const StokesImage& s, const StokesImage& truth);

// 10*log10(1/MSE); mse == 0 sets psnr_infinite instead of throwing.
EvalReport psnr_stokes(const StokesImage& s, const StokesImage& truth);

// Stokes conversion used by the evaluation protocol: stokes_from_camera
// scaled by 1/2 so that s0 lands in [0,1] for in-range camera input.
StokesImage metric_stokes(const CameraImage& img);

enum class EvalMethod { Pbm3d, Bm3dPerChannel, Bm3dStokes, None };

// Accepts "pbm3d", "bm3d-per-channel" (alias "bm3d"), "bm3d-stokes",
// "none"; throws LookupError otherwise.
EvalMethod parse_method(const std::string& name);
std::string method_name(EvalMethod m);

struct EvalParams {
    double sigma = 0.0;
    DenoiseProfile profile;
    std::optional<ChannelTransform> matrix;  // pbm3d only; default opt-global
    std::string matrix_label;
    std::string image_id;
    uint64_t seed = 0;
    unsigned threads = 0;
};

// Runs the method on `noisy`, converts result and truth with
// metric_stokes, and fills the full report.
EvalReport evaluate_method(const CameraImage& noisy, const CameraImage& truth, EvalMethod method,
                           const EvalParams& params);

// One key=value record per line; field names are part of the interface:
// image_id method sigma seed matrix mse psnr_db mse_s0 mse_s1 mse_s2
std::string to_record_line(const EvalReport& r);
EvalReport parse_record_line(const std::string& line);

}  // namespace pbm3d

#endif  // PBM3D_METRICS_HPP
