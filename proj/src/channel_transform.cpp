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
#include "pbm3d/channel_transform.hpp"

#include <cmath>
#include <limits>

#include "pbm3d/error.hpp"

namespace pbm3d {

std::array<double, 3> Mat3::mul(const std::array<double, 3>& v) const {
    return {m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2]};
}

double Mat3::det() const {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

Mat3 Mat3::inverse() const {
    const double d = det();
    if (d == 0.0 || !std::isfinite(d))
        throw ValidationError("Mat3::inverse: singular matrix");
    const double id = 1.0 / d;
    Mat3 r;
    r.m[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) * id;
    r.m[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * id;
    r.m[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * id;
    r.m[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) * id;
    r.m[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * id;
    r.m[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * id;
    r.m[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) * id;
    r.m[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * id;
    r.m[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * id;
    return r;
}

namespace {

double norm1(const Mat3& a) {
    double best = 0.0;
    for (int c = 0; c < 3; ++c) {
        double s = std::abs(a(0, c)) + std::abs(a(1, c)) + std::abs(a(2, c));
        if (s > best) best = s;
    }
    return best;
}

}  // namespace

double Mat3::cond1() const {
    const double d = det();
    if (d == 0.0 || !std::isfinite(d)) return std::numeric_limits<double>::infinity();
    return norm1(*this) * norm1(inverse());
}

double max_row_l1_deviation(const Mat3& m) {
    double worst = 0.0;
    for (int r = 0; r < 3; ++r) {
        const double l1 = std::abs(m(r, 0)) + std::abs(m(r, 1)) + std::abs(m(r, 2));
        worst = std::max(worst, std::abs(l1 - 1.0));
    }
    return worst;
}

ChannelTransform::ChannelTransform() {
    m_.m = {{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};
    inv_ = m_;
}

ChannelTransform ChannelTransform::create(const Mat3& m, double l1_tolerance) {
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            if (!std::isfinite(m(r, c)))
                throw ValidationError("ChannelTransform: non-finite entry");
    if (max_row_l1_deviation(m) > l1_tolerance)
        throw ValidationError("ChannelTransform: row L1 norm != 1");
    if (!(m.cond1() < kMaxCondition))
        throw ValidationError("ChannelTransform: singular or ill-conditioned matrix");
    return ChannelTransform(m, m.inverse());
}

ChannelTransform normalize_rows(const Mat3& m) {
    Mat3 out = m;
    for (int r = 0; r < 3; ++r) {
        const double l1 = std::abs(m(r, 0)) + std::abs(m(r, 1)) + std::abs(m(r, 2));
        if (!(l1 > 0.0) || !std::isfinite(l1))
            throw ValidationError("normalize_rows: zero or non-finite row");
        for (int c = 0; c < 3; ++c) out(r, c) = m(r, c) / l1;
    }
    return ChannelTransform::create(out, 1e-9);
}

namespace {

CameraImage apply_mat(const Mat3& m, const CameraImage& img) {
    img.validate();
    const int w = img.width(), h = img.height();
    CameraImage out{Plane(w, h), Plane(w, h), Plane(w, h)};
    const size_t n = img.i0.size();
    for (size_t k = 0; k < n; ++k) {
        const double a = img.i0.data[k], b = img.i45.data[k], c = img.i90.data[k];
        out.i0.data[k] = m(0, 0) * a + m(0, 1) * b + m(0, 2) * c;
        out.i45.data[k] = m(1, 0) * a + m(1, 1) * b + m(1, 2) * c;
        out.i90.data[k] = m(2, 0) * a + m(2, 1) * b + m(2, 2) * c;
    }
    return out;
}

}  // namespace

CameraImage apply_transform(const ChannelTransform& t, const CameraImage& img) {
    return apply_mat(t.matrix(), img);
}

CameraImage invert_transform(const ChannelTransform& t, const CameraImage& p_triple) {
    return apply_mat(t.inverse_matrix(), p_triple);
}

}  // namespace pbm3d
