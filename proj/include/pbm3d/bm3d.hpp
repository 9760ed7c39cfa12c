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
#ifndef PBM3D_BM3D_HPP
#define PBM3D_BM3D_HPP

#include <utility>
#include <vector>

#include "pbm3d/image.hpp"

namespace pbm3d {

enum class Transform2d { Dct, Bior15 };
enum class Transform1d { Haar, WalshHadamard };
enum class MatchStage { HardThreshold, Wiener };

// All tuning constants of the two-stage pipeline. Defaults follow the
// normal profile of the classic implementation; match thresholds are
// normalized squared differences for [0,1]-range images (2500/255^2 and
// 400/255^2).
struct DenoiseProfile {
    int block_size = 8;
    int step = 3;
    int search_window = 39;  // full window width, centered on the reference
    int max_group_ht = 16;
    int max_group_wie = 32;
    double match_threshold_ht = 2500.0 / 65025.0;
    double match_threshold_wie = 400.0 / 65025.0;
    double lambda_3d = 2.7;
    Transform2d transform_2d = Transform2d::Dct;
    Transform1d transform_1d = Transform1d::Haar;

    int max_group(MatchStage s) const { return s == MatchStage::HardThreshold ? max_group_ht : max_group_wie; }
    double match_threshold(MatchStage s) const {
        return s == MatchStage::HardThreshold ? match_threshold_ht : match_threshold_wie;
    }

    void validate(int width, int height) const;
};

// Blocks similar to one reference block. members[0] is the reference
// (distance 0); the rest are sorted by (distance, row, col). The count is
// a power of two so the across-stack transform stays orthonormal.
struct BlockGroup {
    int ref_row = 0;
    int ref_col = 0;
    std::vector<std::pair<int, int>> members;
    std::vector<double> distances;

    bool operator==(const BlockGroup&) const = default;
};

struct StageResult {
    Plane estimate;
    std::vector<BlockGroup> groups;
};

// Reference-block origins along one axis: 0, step, 2*step, ... with the
// final origin clamped so the last block abuts the image edge.
std::vector<int> reference_grid(int extent, int block_size, int step);

// Raw-pixel matcher: candidates within the search window whose mean
// squared difference is below the stage threshold, power-of-two count.
BlockGroup block_match(const Plane& plane, int ref_row, int ref_col, const DenoiseProfile& profile,
                       MatchStage stage);

// Stage 1: collaborative hard thresholding at lambda_3d * sigma.
// When groups_in is given the matching search is skipped and the groups
// are reused verbatim. Output is bit-identical for any thread count.
StageResult stage1_hard_threshold(const Plane& noisy, double sigma, const DenoiseProfile& profile,
                                  const std::vector<BlockGroup>* groups_in = nullptr,
                                  unsigned threads = 0);

// Stage 2: empirical Wiener shrinkage B^2/(B^2+sigma^2) with the basic
// estimate as pilot. Matching runs on the basic plane.
StageResult stage2_wiener(const Plane& noisy, const Plane& basic, double sigma,
                          const DenoiseProfile& profile,
                          const std::vector<BlockGroup>* groups_in = nullptr, unsigned threads = 0);

// Both stages composed.
Plane denoise_grayscale(const Plane& noisy, double sigma, const DenoiseProfile& profile,
                        unsigned threads = 0);

namespace testing {
// Forward/inverse 3D group transform used by the stages, exposed for
// roundtrip checks. `stack` holds n_members blocks of block_size^2
// coefficients, member-major.
void group_transform_roundtrip(std::vector<double>& stack, int n_members,
                               const DenoiseProfile& profile);
}  // namespace testing

}  // namespace pbm3d

#endif  // PBM3D_BM3D_HPP
