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
#ifndef PBM3D_FIXTURES_HPP
#define PBM3D_FIXTURES_HPP

#include <cstdint>
#include <string>

#include "pbm3d/image.hpp"

namespace pbm3d {

// Noise-free synthetic scenes; the returned image is the exact ground
// truth a test can add noise to.
//   uniform-dop   piecewise-constant tiles of (s0, dop, aop); tile (0,0)
//                 always has dop 0.5, aop 0
//   textured      procedural natural-texture luminance with smoothly
//                 varying synthetic polarization
//   unpolarized   the textured luminance replicated into all three
//                 components (dop identically 0)
enum class FixtureKind { UniformDop, Textured, Unpolarized };

FixtureKind parse_fixture_kind(const std::string& name);

// Deterministic per (kind, size, seed); size >= 32.
CameraImage make_fixture(FixtureKind kind, int size, uint64_t seed);

}  // namespace pbm3d

#endif  // PBM3D_FIXTURES_HPP
