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
#ifndef PBM3D_CHANNEL_TRANSFORM_HPP
#define PBM3D_CHANNEL_TRANSFORM_HPP

#include <array>

#include "pbm3d/image.hpp"

namespace pbm3d {

// Plain 3x3 row-major matrix.
struct Mat3 {
    std::array<std::array<double, 3>, 3> m{};

    double& operator()(int r, int c) { return m[r][c]; }
    double operator()(int r, int c) const { return m[r][c]; }

    std::array<double, 3> mul(const std::array<double, 3>& v) const;
    Mat3 inverse() const;  // throws ValidationError when singular
    double det() const;

    // 1-norm condition number estimate, infinity when singular.
    double cond1() const;

    bool operator==(const Mat3&) const = default;
};

// max over rows of | |a|+|b|+|c| - 1 |
double max_row_l1_deviation(const Mat3& m);

// Row-normalized invertible matrix mapping (i0,i45,i90) to a
// luminance-polarization triple (p0,p1,p2).
class ChannelTransform {
public:
    // Identity mapping.
    ChannelTransform();

    // Validates: each row L1 norm == 1 within tol, cond1 < 1e6.
    static ChannelTransform create(const Mat3& m, double l1_tolerance = 1e-9);

    const Mat3& matrix() const { return m_; }
    const Mat3& inverse_matrix() const { return inv_; }

    std::array<double, 3> forward(const std::array<double, 3>& camera) const { return m_.mul(camera); }
    std::array<double, 3> backward(const std::array<double, 3>& p) const { return inv_.mul(p); }

    bool operator==(const ChannelTransform& o) const { return m_ == o.m_; }

    static constexpr double kMaxCondition = 1e6;

private:
    ChannelTransform(const Mat3& m, const Mat3& inv) : m_(m), inv_(inv) {}
    Mat3 m_;
    Mat3 inv_;
};

// Divide each row by its L1 norm; preserves sign pattern.
// Throws ValidationError on an all-zero row or a singular result.
ChannelTransform normalize_rows(const Mat3& m);

// Per-pixel (p0,p1,p2) = T * (i0,i45,i90). The result reuses the
// CameraImage container; plane k holds channel pk.
CameraImage apply_transform(const ChannelTransform& t, const CameraImage& img);

// Per-pixel inverse; invert_transform(t, apply_transform(t, img)) == img
// up to floating rounding.
CameraImage invert_transform(const ChannelTransform& t, const CameraImage& p_triple);

}  // namespace pbm3d

#endif  // PBM3D_CHANNEL_TRANSFORM_HPP
