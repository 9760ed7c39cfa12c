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
#ifndef PBM3D_OPTIMIZER_HPP
#define PBM3D_OPTIMIZER_HPP

#include <functional>
#include <vector>

#include "pbm3d/bm3d.hpp"
#include "pbm3d/channel_transform.hpp"
#include "pbm3d/image.hpp"

namespace pbm3d {

// One optimization problem: find the transform minimizing the mean
// camera-component MSE of PBM3D over a noise-free image set. The noise
// realization is frozen per run (derived from seed), so every candidate
// matrix sees the same noisy inputs.
struct OptimizationRun {
    std::vector<CameraImage> dataset;
    double sigma = 0.0;
    uint64_t seed = 0;
    int budget = 1;       // Monte Carlo rounds / pattern-search outer iterations
    double delta = 0.01;  // pattern-search perturbation interval
    DenoiseProfile profile;
    unsigned threads = 0;

    void validate() const;
};

struct ObjectiveValue {
    double mean_mse = 0.0;
    std::vector<double> per_image_mse;
};

// Mean over the dataset of the camera-component MSE between each original
// image and PBM3D applied to its frozen noisy copy. Deterministic for a
// fixed (t, run). A singular candidate throws ValidationError; the search
// routines treat that as +infinity.
ObjectiveValue objective(const ChannelTransform& t, const OptimizationRun& run);

struct SearchResult {
    ChannelTransform transform;
    ObjectiveValue objective;
    int iterations = 0;    // pattern search outer iterations
    long evaluations = 0;  // objective evaluations actually performed
    bool converged = true; // pattern search only: false when the budget ran out
};

// Uniform sampling over valid matrices (rows uniform on the signed L1
// sphere, invertibility by rejection), budget rounds, returns the arg-min.
// Candidate r depends only on (seed, r), so results are non-increasing in
// budget for a fixed seed. trace_out, when non-null, receives every
// sampled candidate's objective in round order.
SearchResult monte_carlo_search(const OptimizationRun& run,
                                std::vector<double>* trace_out = nullptr);

// Coordinate-exchange pattern search from t0: per row, every ordered pair
// of entries shifted by +-step for step in {delta, 10*delta}, candidates
// renormalized when a sign change breaks the L1 norm; moves to the best
// strictly improving candidate and stops at a fixed point.
SearchResult pattern_search(const OptimizationRun& run, const ChannelTransform& t0);

// Same search driven by an arbitrary objective; used to unit-test the
// search logic without running the denoiser.
SearchResult pattern_search_with_objective(
    const ChannelTransform& t0, double delta, int budget,
    const std::function<double(const ChannelTransform&)>& fn, unsigned threads = 1);

}  // namespace pbm3d

#endif  // PBM3D_OPTIMIZER_HPP
