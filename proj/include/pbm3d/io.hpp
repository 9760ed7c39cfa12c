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
#ifndef PBM3D_IO_HPP
#define PBM3D_IO_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pbm3d/channel_transform.hpp"
#include "pbm3d/image.hpp"

namespace pbm3d {

// Grayscale plane formats:
//   Pfm32  standard portable float map ("Pf", float32 little-endian)
//   Pfm64  same layout with magic "Pd" and float64 samples; the default
//          float format so doubles survive a save/load cycle bit-exactly
//   Pgm8 / Pgm16  binary PGM, maxval 255 / 65535
enum class PlaneFormat { Pfm64, Pfm32, Pgm8, Pgm16 };

PlaneFormat parse_plane_format(const std::string& name);  // pfm64|pfm|pfm32|pgm8|pgm16
std::string plane_format_extension(PlaneFormat f);        // ".pfm" or ".pgm"

// Format is detected from the file's magic bytes. Integer samples are
// scaled by 1/(2^bits - 1); float samples pass through.
Plane load_plane(const std::filesystem::path& path);

// Integer formats require clip=true to clamp out-of-range values;
// without it an out-of-range sample raises RangeError.
void save_plane(const Plane& p, const std::filesystem::path& path, PlaneFormat format,
                bool clip = false);

struct ManifestEntry {
    std::string id;
    std::filesystem::path path_i0, path_i45, path_i90;
    std::optional<std::filesystem::path> truth_i0, truth_i45, truth_i90;
    std::optional<double> sigma;

    bool has_truth() const { return truth_i0 && truth_i45 && truth_i90; }
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;

    static DatasetManifest load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    const ManifestEntry& find(const std::string& id) const;
};

CameraImage load_triple(const ManifestEntry& entry);
CameraImage load_triple(const std::filesystem::path& p0, const std::filesystem::path& p45,
                        const std::filesystem::path& p90);

// Writes <prefix>_i0<ext>, <prefix>_i45<ext>, <prefix>_i90<ext> and
// returns the three paths.
std::vector<std::filesystem::path> save_triple(const CameraImage& img,
                                               const std::filesystem::path& prefix,
                                               PlaneFormat format, bool clip = false);

// Per-pixel arithmetic mean of aligned frames.
CameraImage average_frames(const std::vector<CameraImage>& frames);

// Plain-text 3x3 matrix file: three lines of three numbers, row-major.
void save_matrix(const Mat3& m, const std::filesystem::path& path);
Mat3 load_matrix(const std::filesystem::path& path);

}  // namespace pbm3d

#endif  // PBM3D_IO_HPP
