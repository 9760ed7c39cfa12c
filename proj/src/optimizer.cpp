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
#include "pbm3d/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "pbm3d/error.hpp"
#include "pbm3d/noise.hpp"
#include "pbm3d/parallel.hpp"
#include "pbm3d/pbm3d.hpp"

namespace pbm3d {

namespace {

constexpr uint64_t kNoiseTag = 0xD0;
constexpr uint64_t kSampleTag = 0x3C;

double camera_mse(const CameraImage& a, const CameraImage& b) {
    double sum = 0.0;
    for (int p = 0; p < 3; ++p) {
        const Plane& pa = a.plane(p);
        const Plane& pb = b.plane(p);
        for (size_t k = 0; k < pa.data.size(); ++k) {
            const double d = pa.data[k] - pb.data[k];
            sum += d * d;
        }
    }
    return sum / (3.0 * static_cast<double>(a.i0.size()));
}

// Frozen noisy copies; every candidate matrix is scored on the same ones.
struct ObjectiveContext {
    const OptimizationRun* run;
    std::vector<CameraImage> noisy;

    explicit ObjectiveContext(const OptimizationRun& r) : run(&r) {
        noisy.reserve(r.dataset.size());
        for (size_t i = 0; i < r.dataset.size(); ++i)
            noisy.push_back(add_noise(r.dataset[i], {r.sigma, derive_seed(r.seed, kNoiseTag, i)}));
    }

    ObjectiveValue eval(const ChannelTransform& t, unsigned threads) const {
        ObjectiveValue v;
        v.per_image_mse.resize(noisy.size());
        Pbm3dConfig cfg{t, run->profile, run->sigma};
        for (size_t i = 0; i < noisy.size(); ++i) {
            const CameraImage denoised = denoise_polarization(noisy[i], cfg, threads);
            v.per_image_mse[i] = camera_mse(run->dataset[i], denoised);
        }
        double sum = 0.0;
        for (double m : v.per_image_mse) sum += m;
        v.mean_mse = sum / static_cast<double>(v.per_image_mse.size());
        return v;
    }
};

using MatrixKey = std::array<double, 9>;

MatrixKey key_of(const Mat3& m) {
    return {m(0, 0), m(0, 1), m(0, 2), m(1, 0), m(1, 1), m(1, 2), m(2, 0), m(2, 1), m(2, 2)};
}

// Row entries uniform on the signed L1 sphere: simplex spacings plus
// independent signs; invertibility enforced by rejection.
ChannelTransform sample_valid_matrix(Rng& rng) {
    for (int attempt = 0; attempt < 10000; ++attempt) {
        Mat3 m;
        for (int r = 0; r < 3; ++r) {
            double u = rng.next_double();
            double v = rng.next_double();
            if (u > v) std::swap(u, v);
            double mag[3] = {u, v - u, 1.0 - v};
            for (int c = 0; c < 3; ++c) {
                const bool negative = rng.next_double() < 0.5;
                m(r, c) = negative ? -mag[c] : mag[c];
            }
        }
        try {
            return ChannelTransform::create(m, 1e-9);
        } catch (const ValidationError&) {
            continue;  // singular or ill-conditioned, resample
        }
    }
    throw Error("monte_carlo_search: could not sample a valid matrix");
}

// Normalization-preserving coordinate exchanges of one row at a time; a
// candidate whose sign pattern changed is renormalized back to the sphere.
std::vector<Mat3> perturbations(const Mat3& cur, double step) {
    std::vector<Mat3> out;
    out.reserve(36);
    for (int r = 0; r < 3; ++r)
        for (int p = 0; p < 3; ++p)
            for (int q = 0; q < 3; ++q) {
                if (p == q) continue;
                Mat3 m = cur;
                m(r, p) += step;
                m(r, q) -= step;
                const double l1 = std::abs(m(r, 0)) + std::abs(m(r, 1)) + std::abs(m(r, 2));
                if (std::abs(l1 - 1.0) > 1e-12)
                    for (int c = 0; c < 3; ++c) m(r, c) /= l1;
                out.push_back(m);
            }
    return out;
}

SearchResult pattern_search_core(const ChannelTransform& t0, double delta, int budget,
                                 const std::function<double(const ChannelTransform&)>& fn,
                                 unsigned threads, long* evaluations_out) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::map<MatrixKey, double> cache;
    long evals = 0;

    const auto eval_matrix = [&fn](const Mat3& m) -> double {
        try {
            return fn(ChannelTransform::create(m, 1e-9));
        } catch (const ValidationError&) {
            return kInf;  // singular candidate
        }
    };

    Mat3 current = t0.matrix();
    double cur_obj = eval_matrix(current);
    ++evals;
    cache[key_of(current)] = cur_obj;

    SearchResult res;
    res.converged = false;
    for (int iter = 1; iter <= budget; ++iter) {
        res.iterations = iter;
        std::vector<Mat3> cand = perturbations(current, delta);
        {
            std::vector<Mat3> far = perturbations(current, 10.0 * delta);
            cand.insert(cand.end(), far.begin(), far.end());
        }

        // dedupe, keep first occurrence order
        std::vector<Mat3> todo;
        std::vector<MatrixKey> keys;
        std::map<MatrixKey, size_t> seen;
        for (const Mat3& m : cand) {
            const MatrixKey k = key_of(m);
            if (seen.emplace(k, keys.size()).second) {
                todo.push_back(m);
                keys.push_back(k);
            }
        }

        std::vector<double> values(todo.size(), kInf);
        std::vector<int> missing;
        for (size_t i = 0; i < todo.size(); ++i) {
            auto it = cache.find(keys[i]);
            if (it != cache.end())
                values[i] = it->second;
            else
                missing.push_back(static_cast<int>(i));
        }
        std::vector<double> fresh(missing.size());
        parallel_for(0, static_cast<int>(missing.size()), threads,
                     [&](int j) { fresh[j] = eval_matrix(todo[missing[j]]); });
        for (size_t j = 0; j < missing.size(); ++j) {
            values[missing[j]] = fresh[j];
            cache[keys[missing[j]]] = fresh[j];
            ++evals;
        }

        size_t best = 0;
        for (size_t i = 1; i < values.size(); ++i)
            if (values[i] < values[best]) best = i;

        if (!todo.empty() && values[best] < cur_obj) {
            current = todo[best];
            cur_obj = values[best];
        } else {
            res.converged = true;  // fixed point: no perturbation improves
            break;
        }
    }

    res.transform = ChannelTransform::create(current, 1e-9);
    res.objective.mean_mse = cur_obj;
    res.evaluations = evals;
    if (evaluations_out) *evaluations_out = evals;
    return res;
}

}  // namespace

void OptimizationRun::validate() const {
    if (dataset.empty()) throw ValidationError("OptimizationRun: dataset must be non-empty");
    for (const CameraImage& img : dataset) img.validate();
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw ValidationError("OptimizationRun: sigma must be >= 0");
    if (budget < 1) throw ValidationError("OptimizationRun: budget must be >= 1");
    if (!(delta > 0.0)) throw ValidationError("OptimizationRun: delta must be > 0");
}

ObjectiveValue objective(const ChannelTransform& t, const OptimizationRun& run) {
    run.validate();
    return ObjectiveContext(run).eval(t, run.threads);
}

SearchResult monte_carlo_search(const OptimizationRun& run, std::vector<double>* trace_out) {
    run.validate();
    const ObjectiveContext ctx(run);

    std::vector<ChannelTransform> candidates(run.budget);
    for (int r = 0; r < run.budget; ++r) {
        Rng rng(derive_seed(run.seed, kSampleTag, static_cast<uint64_t>(r)), 0);
        candidates[r] = sample_valid_matrix(rng);
    }

    std::vector<ObjectiveValue> values(run.budget);
    parallel_for(0, run.budget, run.threads,
                 [&](int r) { values[r] = ctx.eval(candidates[r], 1); });

    int best = 0;
    for (int r = 1; r < run.budget; ++r)
        if (values[r].mean_mse < values[best].mean_mse) best = r;

    if (trace_out) {
        trace_out->clear();
        for (const ObjectiveValue& v : values) trace_out->push_back(v.mean_mse);
    }

    SearchResult res;
    res.transform = candidates[best];
    res.objective = values[best];
    res.evaluations = run.budget;
    res.converged = true;
    return res;
}

SearchResult pattern_search(const OptimizationRun& run, const ChannelTransform& t0) {
    run.validate();
    const ObjectiveContext ctx(run);
    const unsigned outer = resolve_threads(run.threads);
    SearchResult res = pattern_search_core(
        t0, run.delta, run.budget,
        [&](const ChannelTransform& t) { return ctx.eval(t, outer > 1 ? 1 : run.threads).mean_mse; },
        run.threads, nullptr);
    // recompute per-image detail for the winner
    res.objective = ctx.eval(res.transform, run.threads);
    return res;
}

SearchResult pattern_search_with_objective(
    const ChannelTransform& t0, double delta, int budget,
    const std::function<double(const ChannelTransform&)>& fn, unsigned threads) {
    if (budget < 1) throw ValidationError("pattern_search: budget must be >= 1");
    if (!(delta > 0.0)) throw ValidationError("pattern_search: delta must be > 0");
    return pattern_search_core(t0, delta, budget, fn, threads, nullptr);
}

}  // namespace pbm3d
