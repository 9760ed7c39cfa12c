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
#ifndef PBM3D_PBM3D_HPP
#define PBM3D_PBM3D_HPP

#include <array>

#include "pbm3d/bm3d.hpp"
#include "pbm3d/channel_transform.hpp"
#include "pbm3d/image.hpp"

namespace pbm3d {

struct Pbm3dConfig {
    ChannelTransform transform;
    DenoiseProfile profile;
    double sigma = 0.0;  // camera-component noise std

    void validate() const;
};

// Noise std of each transformed channel: sigma * sqrt(a^2+b^2+c^2) per
// row, the exact std of a linear combination of independent N(0,sigma^2).
std::array<double, 3> channel_sigmas(const ChannelTransform& t, double sigma);

// Optional capture of pipeline internals for inspection.
struct Pbm3dTrace {
    std::vector<BlockGroup> stage1_groups;  // matched on noisy p0, shared by p1/p2
    std::vector<BlockGroup> stage2_groups;  // matched on the basic p0 estimate
};

// Joint denoising: transform to (p0,p1,p2), run each stage on p0 and reuse
// its groups for p1/p2 with per-channel sigmas, then invert the transform.
// Stage-2 matching runs on the stage-1 basic estimate of p0.
CameraImage denoise_polarization(const CameraImage& img, const Pbm3dConfig& cfg,
                                 unsigned threads = 0, Pbm3dTrace* trace = nullptr);

// Baseline: grayscale BM3D applied independently to i0, i45, i90.
CameraImage denoise_per_channel(const CameraImage& img, double sigma,
                                const DenoiseProfile& profile, unsigned threads = 0);

// Baseline: transform with the Stokes matrix, denoise each channel
// independently (no group sharing) with per-channel sigmas, invert.
CameraImage denoise_stokes(const CameraImage& img, double sigma, const DenoiseProfile& profile,
                           unsigned threads = 0);

}  // namespace pbm3d

#endif  // PBM3D_PBM3D_HPP
