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
#include "pbm3d/noise.hpp"

#include <algorithm>
#include <cmath>

#include "pbm3d/error.hpp"

namespace pbm3d {

namespace {

constexpr uint64_t kGamma = 0x9E3779B97F4A7C15ull;

uint64_t mix64(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(uint64_t seed, uint64_t stream) : state_(mix64(seed) ^ mix64(stream * kGamma + 1)) {}

uint64_t Rng::next_u64() {
    state_ += kGamma;
    return mix64(state_);
}

double Rng::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::next_gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // Box-Muller; u1 in (0,1] keeps the log finite
    const double u1 = 1.0 - next_double();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

uint64_t derive_seed(uint64_t base, uint64_t a, uint64_t b) {
    return mix64(mix64(base + kGamma * (a + 1)) + kGamma * (b + 1));
}

void NoiseSpec::validate() const {
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw ValidationError("NoiseSpec: sigma must be >= 0");
}

CameraImage add_noise(const CameraImage& img, const NoiseSpec& spec) {
    img.validate();
    spec.validate();
    CameraImage out = img;
    if (spec.sigma == 0.0) return out;
    for (int p = 0; p < 3; ++p) {
        Rng rng(spec.seed, static_cast<uint64_t>(p));
        Plane& plane = out.plane(p);
        for (double& v : plane.data) v += spec.sigma * rng.next_gaussian();
    }
    return out;
}

double dop_bias_probe(double intensity, double sigma, int n_samples, uint64_t seed) {
    if (!(intensity > 0.0))
        throw ValidationError("dop_bias_probe: intensity must be > 0");
    if (n_samples < 1)
        throw ValidationError("dop_bias_probe: n_samples must be >= 1");
    if (!(sigma >= 0.0))
        throw ValidationError("dop_bias_probe: sigma must be >= 0");
    if (sigma == 0.0) return 0.0;

    const double half = 0.5 * intensity;
    Rng r0(seed, 0), r1(seed, 1), r2(seed, 2);
    double sum = 0.0;
    for (int k = 0; k < n_samples; ++k) {
        const double a = half + sigma * r0.next_gaussian();
        const double b = half + sigma * r1.next_gaussian();
        const double c = half + sigma * r2.next_gaussian();
        const double s0 = a + c;
        const double s1 = a - c;
        const double s2 = -a + 2.0 * b - c;
        sum += std::sqrt(s1 * s1 + s2 * s2) / s0;
    }
    return sum / n_samples;
}

namespace {

double plane_sigma_mad(const Plane& p) {
    std::vector<double> hh;
    hh.reserve(static_cast<size_t>(p.width / 2) * (p.height / 2));
    for (int r = 0; r + 1 < p.height; r += 2) {
        const double* top = p.row(r);
        const double* bot = p.row(r + 1);
        for (int c = 0; c + 1 < p.width; c += 2)
            hh.push_back(std::abs(0.5 * (top[c] - top[c + 1] - bot[c] + bot[c + 1])));
    }
    const size_t mid = hh.size() / 2;
    std::nth_element(hh.begin(), hh.begin() + mid, hh.end());
    return hh[mid] / 0.6745;
}

}  // namespace

double estimate_sigma(const CameraImage& img) {
    img.validate();
    if (img.width() < 16 || img.height() < 16)
        throw ValidationError("estimate_sigma: image must be at least 16x16");
    return (plane_sigma_mad(img.i0) + plane_sigma_mad(img.i45) + plane_sigma_mad(img.i90)) / 3.0;
}

}  // namespace pbm3d
