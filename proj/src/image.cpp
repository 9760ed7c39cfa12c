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
#include "pbm3d/image.hpp"

#include <cmath>

#include "pbm3d/error.hpp"

namespace pbm3d {

Plane::Plane(int w, int h, double fill)
    : width(w), height(h), data(static_cast<size_t>(w) * static_cast<size_t>(h), fill) {
    if (w < 1 || h < 1)
        throw StructuralError("plane dimensions must be >= 1");
}

bool Plane::all_finite() const {
    for (double v : data)
        if (!std::isfinite(v)) return false;
    return true;
}

namespace {

void check_triple(const Plane& a, const Plane& b, const Plane& c, const char* what) {
    if (a.width < 1 || a.height < 1)
        throw StructuralError(std::string(what) + ": dimensions must be >= 1");
    if (!a.same_shape(b) || !a.same_shape(c))
        throw StructuralError(std::string(what) + ": plane dimensions differ");
    if (a.data.size() != static_cast<size_t>(a.width) * a.height ||
        b.data.size() != static_cast<size_t>(b.width) * b.height ||
        c.data.size() != static_cast<size_t>(c.width) * c.height)
        throw StructuralError(std::string(what) + ": plane buffer size mismatch");
    if (!a.all_finite() || !b.all_finite() || !c.all_finite())
        throw ValidationError(std::string(what) + ": non-finite sample");
}

}  // namespace

CameraImage CameraImage::create(Plane i0, Plane i45, Plane i90) {
    CameraImage img{std::move(i0), std::move(i45), std::move(i90)};
    img.validate();
    return img;
}

void CameraImage::validate() const { check_triple(i0, i45, i90, "CameraImage"); }

Plane& CameraImage::plane(int idx) { return idx == 0 ? i0 : (idx == 1 ? i45 : i90); }
const Plane& CameraImage::plane(int idx) const { return idx == 0 ? i0 : (idx == 1 ? i45 : i90); }

StokesImage StokesImage::create(Plane s0, Plane s1, Plane s2) {
    StokesImage s{std::move(s0), std::move(s1), std::move(s2)};
    s.validate();
    return s;
}

void StokesImage::validate() const { check_triple(s0, s1, s2, "StokesImage"); }

Plane& StokesImage::plane(int idx) { return idx == 0 ? s0 : (idx == 1 ? s1 : s2); }
const Plane& StokesImage::plane(int idx) const { return idx == 0 ? s0 : (idx == 1 ? s1 : s2); }

StokesImage stokes_from_camera(const CameraImage& img) {
    img.validate();
    const int w = img.width(), h = img.height();
    StokesImage s{Plane(w, h), Plane(w, h), Plane(w, h)};
    const size_t n = img.i0.size();
    for (size_t k = 0; k < n; ++k) {
        const double a = img.i0.data[k], b = img.i45.data[k], c = img.i90.data[k];
        s.s0.data[k] = a + c;
        s.s1.data[k] = a - c;
        s.s2.data[k] = -a + 2.0 * b - c;
    }
    return s;
}

CameraImage camera_from_stokes(const StokesImage& s) {
    s.validate();
    const int w = s.width(), h = s.height();
    CameraImage img{Plane(w, h), Plane(w, h), Plane(w, h)};
    const size_t n = s.s0.size();
    for (size_t k = 0; k < n; ++k) {
        const double s0 = s.s0.data[k], s1 = s.s1.data[k], s2 = s.s2.data[k];
        img.i0.data[k] = 0.5 * (s0 + s1);
        img.i90.data[k] = 0.5 * (s0 - s1);
        img.i45.data[k] = 0.5 * (s0 + s2);
    }
    return img;
}

PolarizationMaps compute_dop(const StokesImage& s, double eps) {
    s.validate();
    if (!(eps > 0.0))
        throw ValidationError("compute_dop: eps must be > 0");
    const int w = s.width(), h = s.height();
    PolarizationMaps maps;
    maps.width = w;
    maps.height = h;
    maps.dop = Plane(w, h);
    maps.aop = Plane(w, h);
    maps.mask.assign(static_cast<size_t>(w) * h, 1);
    for (size_t k = 0; k < s.s0.size(); ++k) {
        const double s0 = s.s0.data[k];
        if (s0 <= eps) {
            maps.mask[k] = 0;
            maps.dop.data[k] = 0.0;
        } else {
            maps.dop.data[k] = std::sqrt(s.s1.data[k] * s.s1.data[k] + s.s2.data[k] * s.s2.data[k]) / s0;
        }
    }
    return maps;
}

PolarizationMaps compute_aop(const StokesImage& s) {
    s.validate();
    const int w = s.width(), h = s.height();
    PolarizationMaps maps;
    maps.width = w;
    maps.height = h;
    maps.dop = Plane(w, h);
    maps.aop = Plane(w, h);
    maps.mask.assign(static_cast<size_t>(w) * h, 1);
    constexpr double half_pi = 1.5707963267948966;
    for (size_t k = 0; k < s.s1.size(); ++k) {
        const double s1 = s.s1.data[k], s2 = s.s2.data[k];
        if (s1 == 0.0 && s2 == 0.0) {
            maps.mask[k] = 0;
            maps.aop.data[k] = 0.0;
            continue;
        }
        double a = 0.5 * std::atan2(s2, s1);
        // atan2(-0.0, x<0) lands on -pi; fold to the (-pi/2, pi/2] branch
        if (a <= -half_pi) a += 2.0 * half_pi;
        if (a > half_pi) a -= 2.0 * half_pi;
        maps.aop.data[k] = a;
    }
    return maps;
}

}  // namespace pbm3d
