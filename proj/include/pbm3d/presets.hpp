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
#ifndef PBM3D_PRESETS_HPP
#define PBM3D_PRESETS_HPP

#include <string>
#include <vector>

#include "pbm3d/channel_transform.hpp"

namespace pbm3d {

// Published channel-transform matrices, verbatim:
//   stokes            row-normalized Stokes transform
//   opponent          the color opponent matrix reused for polarization
//   opt-global        matrix tuned on the full outdoor set, all noise levels
//   opt-sigma-<v>     per-noise-level tuned matrices,
//                     v in {0.01, 0.026, 0.041, 0.057, 0.072, 0.088,
//                           0.1, 0.12, 0.13, 0.15}
// Throws LookupError for unknown names.
Mat3 preset(const std::string& name);

std::vector<std::string> preset_names();

// Usable transform for a preset: rows renormalized to unit L1 where the
// published digits deviate (opt-global row 1 is off by 0.02, the tuned
// matrices' row 0 by 0.001). deviation_out, when non-null, receives the
// verbatim matrix's max row deviation so callers can report it.
ChannelTransform preset_transform(const std::string& name, double* deviation_out = nullptr);

}  // namespace pbm3d

#endif  // PBM3D_PRESETS_HPP
