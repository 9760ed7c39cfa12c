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
#ifndef PBM3D_IMAGE_HPP
#define PBM3D_IMAGE_HPP

#include <cstdint>
#include <vector>

namespace pbm3d {

// Single float64 raster, row-major.
struct Plane {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    Plane() = default;
    Plane(int w, int h, double fill = 0.0);

    double& at(int row, int col) { return data[static_cast<size_t>(row) * width + col]; }
    double at(int row, int col) const { return data[static_cast<size_t>(row) * width + col]; }
    const double* row(int r) const { return data.data() + static_cast<size_t>(r) * width; }
    double* row(int r) { return data.data() + static_cast<size_t>(r) * width; }
    size_t size() const { return data.size(); }

    bool same_shape(const Plane& o) const { return width == o.width && height == o.height; }
    bool all_finite() const;
};

// Intensities through polarizers at 0, 45 and 90 degrees to horizontal.
// Nominal range [0,1]; noisy data may lie outside and is never clipped.
struct CameraImage {
    Plane i0, i45, i90;

    int width() const { return i0.width; }
    int height() const { return i0.height; }

    static CameraImage create(Plane i0, Plane i45, Plane i90);

    // Throws StructuralError / ValidationError when the invariants
    // (equal dims, width/height >= 1, finite samples) do not hold.
    void validate() const;

    Plane& plane(int idx);
    const Plane& plane(int idx) const;
};

// Linear Stokes components: s0 total intensity, s1/s2 polarization differences.
struct StokesImage {
    Plane s0, s1, s2;

    int width() const { return s0.width; }
    int height() const { return s0.height; }

    static StokesImage create(Plane s0, Plane s1, Plane s2);
    void validate() const;

    Plane& plane(int idx);
    const Plane& plane(int idx) const;
};

// DoP / AoP rasters plus a validity mask (1 = valid, 0 = degenerate pixel).
struct PolarizationMaps {
    Plane dop;                  // sqrt(s1^2+s2^2)/s0, >= 0, not clamped to 1
    Plane aop;                  // radians in (-pi/2, pi/2]
    std::vector<uint8_t> mask;  // per pixel
    int width = 0;
    int height = 0;
};

// s0 = i0 + i90, s1 = i0 - i90, s2 = -i0 + 2*i45 - i90
StokesImage stokes_from_camera(const CameraImage& img);

// Exact algebraic inverse: i0 = (s0+s1)/2, i90 = (s0-s1)/2, i45 = (s0+s2)/2
CameraImage camera_from_stokes(const StokesImage& s);

// DoP per pixel; pixels with s0 <= eps are masked and set to 0.
PolarizationMaps compute_dop(const StokesImage& s, double eps = 1e-8);

// AoP = atan2(s2, s1) / 2 folded into (-pi/2, pi/2]; s1 = s2 = 0 masked.
PolarizationMaps compute_aop(const StokesImage& s);

}  // namespace pbm3d

#endif  // PBM3D_IMAGE_HPP
