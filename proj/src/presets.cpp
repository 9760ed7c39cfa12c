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
#include "pbm3d/presets.hpp"

#include <utility>

#include "pbm3d/error.hpp"

namespace pbm3d {

namespace {

Mat3 make(double a, double b, double c, double d, double e, double f, double g, double h, double i) {
    Mat3 m;
    m.m = {{{a, b, c}, {d, e, f}, {g, h, i}}};
    return m;
}

const std::pair<const char*, Mat3> kPresets[] = {
    {"stokes", make(0.5, 0.0, 0.5,
                    0.5, 0.0, -0.5,
                    -0.25, 0.5, -0.25)},
    {"opponent", make(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0,
                      0.5, 0.0, -0.5,
                      0.25, -0.5, 0.25)},
    {"opt-global", make(0.3133, 0.3833, 0.3033,
                        0.4800, 0.0300, -0.5100,
                        0.2600, -0.5200, 0.2200)},
    {"opt-sigma-0.01", make(0.323, 0.363, 0.313,
                            0.500, -0.210, -0.290,
                            0.150, -0.500, 0.350)},
    {"opt-sigma-0.026", make(0.323, 0.363, 0.313,
                             0.500, -0.210, -0.290,
                             0.150, -0.500, 0.350)},
    {"opt-sigma-0.041", make(0.323, 0.363, 0.313,
                             0.500, -0.230, -0.270,
                             0.160, -0.500, 0.340)},
    {"opt-sigma-0.057", make(0.323, 0.363, 0.313,
                             0.500, -0.210, -0.290,
                             0.150, -0.500, 0.350)},
    {"opt-sigma-0.072", make(0.323, 0.363, 0.313,
                             0.510, -0.010, -0.480,
                             0.250, -0.510, 0.240)},
    {"opt-sigma-0.088", make(0.323, 0.363, 0.313,
                             0.300, 0.210, -0.490,
                             0.240, -0.520, 0.240)},
    {"opt-sigma-0.1", make(0.323, 0.373, 0.303,
                           0.420, 0.080, -0.500,
                           0.250, -0.510, 0.240)},
    {"opt-sigma-0.12", make(0.343, 0.353, 0.303,
                            0.480, -0.120, -0.400,
                            0.130, -0.520, 0.350)},
    {"opt-sigma-0.13", make(0.333, 0.333, 0.333,
                            0.480, -0.230, -0.290,
                            0.040, -0.530, 0.430)},
    {"opt-sigma-0.15", make(0.343, 0.353, 0.303,
                            0.480, -0.120, -0.400,
                            0.130, -0.520, 0.350)},
};

}  // namespace

Mat3 preset(const std::string& name) {
    for (const auto& [key, m] : kPresets)
        if (name == key) return m;
    throw LookupError("unknown preset matrix: " + name);
}

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& [key, m] : kPresets) {
        (void)m;
        names.emplace_back(key);
    }
    return names;
}

ChannelTransform preset_transform(const std::string& name, double* deviation_out) {
    const Mat3 verbatim = preset(name);
    if (deviation_out) *deviation_out = max_row_l1_deviation(verbatim);
    return normalize_rows(verbatim);
}

}  // namespace pbm3d
