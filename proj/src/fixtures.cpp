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
#include "pbm3d/fixtures.hpp"

#include <algorithm>
#include <cmath>

#include "pbm3d/error.hpp"
#include "pbm3d/noise.hpp"

namespace pbm3d {

namespace {

constexpr double kTwoPi = 6.283185307179586;

// Multi-frequency texture with a few sharp-edged shapes; roughly natural
// statistics and plenty of self-similar structure.
Plane make_luminance(int size, uint64_t seed) {
    Rng rng(seed, 100);
    const double base = 0.34 + 0.08 * rng.next_double();
    const double a1 = 0.13 + 0.06 * rng.next_double();
    const double f1 = 2.0 + std::floor(rng.next_double() * 3.0);
    const double f2 = 2.0 + std::floor(rng.next_double() * 3.0);
    const double p1 = rng.next_double(), p2 = rng.next_double();
    const double a2 = 0.10 + 0.05 * rng.next_double();
    const double f3 = 3.0 + std::floor(rng.next_double() * 3.0);
    const double p3 = rng.next_double();

    struct Shape {
        int r0, c0, r1, c1;
        double delta;
        bool disk;
    };
    std::vector<Shape> shapes;
    const int n_shapes = 5 + static_cast<int>(rng.next_double() * 3.0);
    for (int i = 0; i < n_shapes; ++i) {
        Shape s{};
        const int sr = size / 8 + static_cast<int>(rng.next_double() * size / 3.0);
        const int sc = size / 8 + static_cast<int>(rng.next_double() * size / 3.0);
        s.r0 = static_cast<int>(rng.next_double() * (size - sr));
        s.c0 = static_cast<int>(rng.next_double() * (size - sc));
        s.r1 = s.r0 + sr;
        s.c1 = s.c0 + sc;
        s.delta = (rng.next_double() < 0.5 ? -1.0 : 1.0) * (0.12 + 0.12 * rng.next_double());
        s.disk = rng.next_double() < 0.4;
        shapes.push_back(s);
    }

    Plane lum(size, size);
    const double inv = 1.0 / size;
    for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c) {
            const double x = c * inv, y = r * inv;
            double v = base;
            v += a1 * std::sin(kTwoPi * (f1 * x + p1)) * std::sin(kTwoPi * (f2 * y + p2));
            v += a2 * std::sin(kTwoPi * f3 * (x + y) * 0.5 + kTwoPi * p3);
            v += 0.04 * std::sin(kTwoPi * 9.0 * x) * std::cos(kTwoPi * 11.0 * y);
            for (const Shape& s : shapes) {
                if (s.disk) {
                    const double cr = 0.5 * (s.r0 + s.r1), cc = 0.5 * (s.c0 + s.c1);
                    const double rad = 0.5 * std::min(s.r1 - s.r0, s.c1 - s.c0);
                    const double dr = r - cr, dc = c - cc;
                    if (dr * dr + dc * dc <= rad * rad) v += s.delta;
                } else if (r >= s.r0 && r < s.r1 && c >= s.c0 && c < s.c1) {
                    v += s.delta;
                }
            }
            lum.at(r, c) = std::clamp(v, 0.08, 0.98);
        }
    }
    return lum;
}

CameraImage camera_from_fields(const Plane& s0, const Plane& dop, const Plane& aop) {
    const int n = s0.width;
    CameraImage img{Plane(n, n), Plane(n, n), Plane(n, n)};
    for (size_t k = 0; k < s0.data.size(); ++k) {
        const double i_total = s0.data[k];
        const double s1 = dop.data[k] * i_total * std::cos(2.0 * aop.data[k]);
        const double s2 = dop.data[k] * i_total * std::sin(2.0 * aop.data[k]);
        img.i0.data[k] = 0.5 * (i_total + s1);
        img.i90.data[k] = 0.5 * (i_total - s1);
        img.i45.data[k] = 0.5 * (i_total + s2);
    }
    return img;
}

CameraImage make_textured(int size, uint64_t seed) {
    Plane s0 = make_luminance(size, seed);
    Rng rng(seed, 200);
    const double q1 = rng.next_double(), q2 = rng.next_double(), q3 = rng.next_double();
    Plane dop(size, size), aop(size, size);
    const double inv = 1.0 / size;
    for (int r = 0; r < size; ++r)
        for (int c = 0; c < size; ++c) {
            const double x = c * inv, y = r * inv;
            dop.at(r, c) = 0.25 + 0.20 * std::sin(kTwoPi * (x + q1)) * std::cos(kTwoPi * (y + q2));
            aop.at(r, c) = 1.0 * std::sin(kTwoPi * 0.5 * (x - y) + kTwoPi * q3);
        }
    return camera_from_fields(s0, dop, aop);
}

CameraImage make_uniform_dop(int size, uint64_t seed) {
    Rng rng(seed, 300);
    const int tiles = 4;
    const double dop_values[] = {0.0, 0.2, 0.4, 0.5, 0.7};
    const double aop_values[] = {0.0, 0.39269908169872414, 0.7853981633974483,
                                 -0.39269908169872414, 1.1780972450961724};
    double tile_s0[tiles][tiles], tile_d[tiles][tiles], tile_a[tiles][tiles];
    for (int tr = 0; tr < tiles; ++tr)
        for (int tc = 0; tc < tiles; ++tc) {
            tile_s0[tr][tc] = 0.35 + 0.6 * rng.next_double();
            tile_d[tr][tc] = dop_values[static_cast<int>(rng.next_double() * 5.0)];
            tile_a[tr][tc] = aop_values[static_cast<int>(rng.next_double() * 5.0)];
        }
    // fixed reference tile
    tile_s0[0][0] = 0.8;
    tile_d[0][0] = 0.5;
    tile_a[0][0] = 0.0;

    Plane s0(size, size), dop(size, size), aop(size, size);
    for (int r = 0; r < size; ++r)
        for (int c = 0; c < size; ++c) {
            const int tr = std::min(tiles - 1, r * tiles / size);
            const int tc = std::min(tiles - 1, c * tiles / size);
            s0.at(r, c) = tile_s0[tr][tc];
            dop.at(r, c) = tile_d[tr][tc];
            aop.at(r, c) = tile_a[tr][tc];
        }
    return camera_from_fields(s0, dop, aop);
}

CameraImage make_unpolarized(int size, uint64_t seed) {
    Plane lum = make_luminance(size, seed);
    CameraImage img;
    img.i0 = lum;
    img.i45 = lum;
    img.i90 = std::move(lum);
    return img;
}

}  // namespace

FixtureKind parse_fixture_kind(const std::string& name) {
    if (name == "uniform-dop") return FixtureKind::UniformDop;
    if (name == "textured") return FixtureKind::Textured;
    if (name == "unpolarized") return FixtureKind::Unpolarized;
    throw LookupError("unknown fixture kind: " + name);
}

CameraImage make_fixture(FixtureKind kind, int size, uint64_t seed) {
    if (size < 32) throw ValidationError("make_fixture: size must be >= 32");
    switch (kind) {
        case FixtureKind::UniformDop: return make_uniform_dop(size, seed);
        case FixtureKind::Textured: return make_textured(size, seed);
        case FixtureKind::Unpolarized: return make_unpolarized(size, seed);
    }
    throw LookupError("unknown fixture kind enum");
}

}  // namespace pbm3d
