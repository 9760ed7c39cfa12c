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
#ifndef PBM3D_NOISE_HPP
#define PBM3D_NOISE_HPP

#include <cstdint>

#include "pbm3d/image.hpp"

namespace pbm3d {

// Splittable counter-style generator: SplitMix64 (Steele/Lea/Vigna) keyed
// by (seed, stream). Gaussian variates via Box-Muller on 53-bit uniforms,
// so a (seed, stream) pair yields the same sequence on every build.
class Rng {
public:
    Rng(uint64_t seed, uint64_t stream);

    uint64_t next_u64();
    double next_double();    // uniform in [0,1)
    double next_gaussian();  // standard normal

private:
    uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Mixes extra keys into a base seed to derive independent substreams.
uint64_t derive_seed(uint64_t base, uint64_t a, uint64_t b = 0);

struct NoiseSpec {
    double sigma = 0.0;  // standard deviation, [0,1] intensity units
    uint64_t seed = 0;

    void validate() const;  // sigma >= 0
};

// Adds an independent N(0, sigma^2) draw to every sample of every plane.
// Per-plane substreams come from (seed, plane index); output is not clipped
// and identical (img, spec) pairs are bit-identical.
CameraImage add_noise(const CameraImage& img, const NoiseSpec& spec);

// Mean naive-DoP estimate over n_samples simulated unpolarized pixels
// (i0 = i45 = i90 = intensity/2, true DoP 0). Strictly positive for
// sigma > 0: the plug-in DoP estimator is biased upward.
double dop_bias_probe(double intensity, double sigma, int n_samples, uint64_t seed);

// Noise std estimate: median absolute deviation of the finest diagonal
// (Haar HH) subband with the 0.6745 normalizer, averaged over the planes.
double estimate_sigma(const CameraImage& img);

}  // namespace pbm3d

#endif  // PBM3D_NOISE_HPP
