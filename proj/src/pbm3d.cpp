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
#include "pbm3d/pbm3d.hpp"

#include <cmath>

#include "pbm3d/error.hpp"
#include "pbm3d/presets.hpp"

namespace pbm3d {

void Pbm3dConfig::validate() const {
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw ValidationError("Pbm3dConfig: sigma must be >= 0");
}

std::array<double, 3> channel_sigmas(const ChannelTransform& t, double sigma) {
    std::array<double, 3> out{};
    const Mat3& m = t.matrix();
    for (int r = 0; r < 3; ++r)
        out[r] = sigma * std::sqrt(m(r, 0) * m(r, 0) + m(r, 1) * m(r, 1) + m(r, 2) * m(r, 2));
    return out;
}

CameraImage denoise_polarization(const CameraImage& img, const Pbm3dConfig& cfg, unsigned threads,
                                 Pbm3dTrace* trace) {
    img.validate();
    cfg.validate();
    const std::array<double, 3> sig = channel_sigmas(cfg.transform, cfg.sigma);

    CameraImage p = apply_transform(cfg.transform, img);

    // stage 1: groups from noisy p0, shared across channels
    StageResult b0 = stage1_hard_threshold(p.plane(0), sig[0], cfg.profile, nullptr, threads);
    StageResult b1 = stage1_hard_threshold(p.plane(1), sig[1], cfg.profile, &b0.groups, threads);
    StageResult b2 = stage1_hard_threshold(p.plane(2), sig[2], cfg.profile, &b0.groups, threads);

    // stage 2: groups from the basic p0 estimate, shared across channels
    StageResult f0 = stage2_wiener(p.plane(0), b0.estimate, sig[0], cfg.profile, nullptr, threads);
    StageResult f1 = stage2_wiener(p.plane(1), b1.estimate, sig[1], cfg.profile, &f0.groups, threads);
    StageResult f2 = stage2_wiener(p.plane(2), b2.estimate, sig[2], cfg.profile, &f0.groups, threads);

    if (trace) {
        trace->stage1_groups = b0.groups;
        trace->stage2_groups = f0.groups;
    }

    CameraImage filtered{std::move(f0.estimate), std::move(f1.estimate), std::move(f2.estimate)};
    return invert_transform(cfg.transform, filtered);
}

CameraImage denoise_per_channel(const CameraImage& img, double sigma, const DenoiseProfile& profile,
                                unsigned threads) {
    img.validate();
    CameraImage out;
    out.i0 = denoise_grayscale(img.i0, sigma, profile, threads);
    out.i45 = denoise_grayscale(img.i45, sigma, profile, threads);
    out.i90 = denoise_grayscale(img.i90, sigma, profile, threads);
    return out;
}

CameraImage denoise_stokes(const CameraImage& img, double sigma, const DenoiseProfile& profile,
                           unsigned threads) {
    img.validate();
    const ChannelTransform t = preset_transform("stokes");
    const std::array<double, 3> sig = channel_sigmas(t, sigma);
    CameraImage p = apply_transform(t, img);
    CameraImage filtered;
    for (int k = 0; k < 3; ++k)
        filtered.plane(k) = denoise_grayscale(p.plane(k), sig[k], profile, threads);
    return invert_transform(t, filtered);
}

}  // namespace pbm3d
