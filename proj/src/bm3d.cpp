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
#include "pbm3d/bm3d.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <tuple>

#include "pbm3d/error.hpp"
#include "pbm3d/parallel.hpp"

namespace pbm3d {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool is_power_of_two(int n) { return n >= 1 && (n & (n - 1)) == 0; }

int pow2_floor(int n) {
    int p = 1;
    while (p * 2 <= n) p *= 2;
    return p;
}

// ---------------------------------------------------------------- 2D plans

struct Dct2dPlan {
    int n = 0;
    std::vector<double> d;   // orthonormal DCT-II matrix, row = frequency
    std::vector<double> dt;  // transpose

    explicit Dct2dPlan(int size)
        : n(size), d(static_cast<size_t>(size) * size), dt(static_cast<size_t>(size) * size) {
        const double s0 = std::sqrt(1.0 / n);
        const double sk = std::sqrt(2.0 / n);
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j) {
                const double v = (k == 0 ? s0 : sk) * std::cos(kPi * (2.0 * j + 1.0) * k / (2.0 * n));
                d[static_cast<size_t>(k) * n + j] = v;
                dt[static_cast<size_t>(j) * n + k] = v;
            }
    }

    // C = A * B for n x n row-major blocks, accumulate-over-rows form so
    // the inner loops stay contiguous
    void matmul(const double* a, const double* b, double* c) const {
        for (int r = 0; r < n; ++r) {
            double* crow = c + r * n;
            for (int j = 0; j < n; ++j) crow[j] = 0.0;
            for (int k = 0; k < n; ++k) {
                const double av = a[r * n + k];
                const double* brow = b + k * n;
                for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
            }
        }
    }

    void forward(const double* in, double* out, double* tmp) const {
        matmul(in, dt.data(), tmp);  // in * D^T
        matmul(d.data(), tmp, out);  // D * (in * D^T)
    }

    void inverse(const double* in, double* out, double* tmp) const {
        matmul(in, d.data(), tmp);    // in * D
        matmul(dt.data(), tmp, out);  // D^T * (in * D)
    }
};

// bior1.5 analysis level in lifting form over a periodic signal of even
// length s: with e/o the even/odd samples, u = e+o, v = e-o,
//   a[j] = u[j]/sqrt2 + c1*(v[j+1]-v[j-1]) - c0*(v[j+2]-v[j-2])
//   d[j] = -v[j]/sqrt2
// which is exactly invertible.
constexpr double kBiorC0 = 0.016572815184059706;
constexpr double kBiorC1 = 0.12153397801643787;
constexpr double kInvSqrt2 = 0.70710678118654752440;

void bior_level_forward(double* x, int s, double* scratch) {
    const int m = s / 2;
    double* u = scratch;
    double* v = scratch + m;
    for (int j = 0; j < m; ++j) {
        u[j] = x[2 * j] + x[2 * j + 1];
        v[j] = x[2 * j] - x[2 * j + 1];
    }
    for (int j = 0; j < m; ++j) {
        const double vp1 = v[(j + 1) % m], vm1 = v[(j + m - 1) % m];
        const double vp2 = v[(j + 2) % m], vm2 = v[(j + m - 2) % m];
        x[j] = kInvSqrt2 * u[j] + kBiorC1 * (vp1 - vm1) - kBiorC0 * (vp2 - vm2);
        x[m + j] = -kInvSqrt2 * v[j];
    }
}

void bior_level_inverse(double* x, int s, double* scratch) {
    const int m = s / 2;
    double* u = scratch;
    double* v = scratch + m;
    for (int j = 0; j < m; ++j) v[j] = -x[m + j] / kInvSqrt2;
    for (int j = 0; j < m; ++j) {
        const double vp1 = v[(j + 1) % m], vm1 = v[(j + m - 1) % m];
        const double vp2 = v[(j + 2) % m], vm2 = v[(j + m - 2) % m];
        u[j] = (x[j] - kBiorC1 * (vp1 - vm1) + kBiorC0 * (vp2 - vm2)) / kInvSqrt2;
    }
    for (int j = 0; j < m; ++j) {
        x[2 * j] = 0.5 * (u[j] + v[j]);
        x[2 * j + 1] = 0.5 * (u[j] - v[j]);
    }
}

struct Transform2dPlan {
    Transform2d kind;
    int n;
    Dct2dPlan dct;

    Transform2dPlan(Transform2d k, int size) : kind(k), n(size), dct(size) {}

    // scratch must hold 2*n*n doubles
    void forward(const double* in, double* out, double* scratch) const {
        if (kind == Transform2d::Dct) {
            dct.forward(in, out, scratch);
            return;
        }
        std::copy(in, in + n * n, out);
        double* col = scratch;
        double* lvl = scratch + n;
        for (int s = n; s >= 2; s /= 2) {
            for (int r = 0; r < s; ++r) bior_level_forward(out + r * n, s, lvl);
            for (int c = 0; c < s; ++c) {
                for (int r = 0; r < s; ++r) col[r] = out[r * n + c];
                bior_level_forward(col, s, lvl);
                for (int r = 0; r < s; ++r) out[r * n + c] = col[r];
            }
        }
    }

    void inverse(const double* in, double* out, double* scratch) const {
        if (kind == Transform2d::Dct) {
            dct.inverse(in, out, scratch);
            return;
        }
        std::copy(in, in + n * n, out);
        double* col = scratch;
        double* lvl = scratch + n;
        int smallest = n;
        while (smallest > 2) smallest /= 2;
        for (int s = smallest; s <= n; s *= 2) {
            for (int c = 0; c < s; ++c) {
                for (int r = 0; r < s; ++r) col[r] = out[r * n + c];
                bior_level_inverse(col, s, lvl);
                for (int r = 0; r < s; ++r) out[r * n + c] = col[r];
            }
            for (int r = 0; r < s; ++r) bior_level_inverse(out + r * n, s, lvl);
        }
    }
};

// ------------------------------------------------------------- 1D (stack)

// The across-stack transforms work on a member-major stack (v[m*width+k])
// so the inner loops run over the contiguous width.

void wht_members(double* v, int n, int width) {
    for (int len = 1; len < n; len <<= 1)
        for (int i = 0; i < n; i += len << 1)
            for (int j = i; j < i + len; ++j) {
                double* a = v + static_cast<size_t>(j) * width;
                double* b = v + static_cast<size_t>(j + len) * width;
                for (int k = 0; k < width; ++k) {
                    const double x = a[k], y = b[k];
                    a[k] = x + y;
                    b[k] = x - y;
                }
            }
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (size_t k = 0; k < static_cast<size_t>(n) * width; ++k) v[k] *= scale;
}

void stack_forward_members(Transform1d kind, double* v, int n, int width, double* scratch) {
    if (n == 1) return;
    if (kind == Transform1d::WalshHadamard) {
        wht_members(v, n, width);
        return;
    }
    for (int s = n; s >= 2; s /= 2) {
        const int m = s / 2;
        for (int i = 0; i < m; ++i) {
            const double* e = v + static_cast<size_t>(2 * i) * width;
            const double* o = v + static_cast<size_t>(2 * i + 1) * width;
            double* a = scratch + static_cast<size_t>(i) * width;
            double* d = scratch + static_cast<size_t>(m + i) * width;
            for (int k = 0; k < width; ++k) {
                a[k] = kInvSqrt2 * (e[k] + o[k]);
                d[k] = kInvSqrt2 * (e[k] - o[k]);
            }
        }
        std::copy(scratch, scratch + static_cast<size_t>(s) * width, v);
    }
}

void stack_inverse_members(Transform1d kind, double* v, int n, int width, double* scratch) {
    if (n == 1) return;
    if (kind == Transform1d::WalshHadamard) {
        wht_members(v, n, width);
        return;
    }
    for (int s = 2; s <= n; s *= 2) {
        const int m = s / 2;
        for (int i = 0; i < m; ++i) {
            const double* a = v + static_cast<size_t>(i) * width;
            const double* d = v + static_cast<size_t>(m + i) * width;
            double* e = scratch + static_cast<size_t>(2 * i) * width;
            double* o = scratch + static_cast<size_t>(2 * i + 1) * width;
            for (int k = 0; k < width; ++k) {
                e[k] = kInvSqrt2 * (a[k] + d[k]);
                o[k] = kInvSqrt2 * (a[k] - d[k]);
            }
        }
        std::copy(scratch, scratch + static_cast<size_t>(s) * width, v);
    }
}

// ----------------------------------------------------------- block spectra

// 2D spectra of sliding blocks, either for every origin (dense, used by
// the heavy-noise matcher) or only for the origins a group list touches.
struct BlockSpectra {
    int origins_h = 0;
    int origins_w = 0;
    int bs2 = 0;
    std::vector<int32_t> slot;  // origin -> coef slot, -1 when absent
    std::vector<double> coef;

    const double* at(int r, int c) const {
        return coef.data() +
               static_cast<size_t>(slot[static_cast<size_t>(r) * origins_w + c]) * bs2;
    }
};

void transform_origin_list(const Plane& p, const Transform2dPlan& plan, BlockSpectra& sp,
                           const std::vector<std::pair<int, int>>& origins, unsigned threads) {
    const int bs = plan.n;
    const int chunk = 256;
    const int n_chunks = (static_cast<int>(origins.size()) + chunk - 1) / chunk;
    parallel_for(0, n_chunks, threads, [&](int ci) {
        std::vector<double> block(sp.bs2), scratch(2 * sp.bs2);
        const size_t lo = static_cast<size_t>(ci) * chunk;
        const size_t hi = std::min(origins.size(), lo + chunk);
        for (size_t i = lo; i < hi; ++i) {
            const auto [r, c] = origins[i];
            for (int j = 0; j < bs; ++j)
                std::copy(p.row(r + j) + c, p.row(r + j) + c + bs, block.data() + j * bs);
            plan.forward(block.data(),
                         sp.coef.data() +
                             static_cast<size_t>(sp.slot[static_cast<size_t>(r) * sp.origins_w + c]) *
                                 sp.bs2,
                         scratch.data());
        }
    });
}

void fill_spectra_dense(BlockSpectra& sp, const Plane& p, const Transform2dPlan& plan,
                        unsigned threads, std::vector<std::pair<int, int>>& origins) {
    const int bs = plan.n;
    sp.origins_h = p.height - bs + 1;
    sp.origins_w = p.width - bs + 1;
    sp.bs2 = bs * bs;
    const size_t count = static_cast<size_t>(sp.origins_h) * sp.origins_w;
    sp.slot.resize(count);
    for (size_t i = 0; i < count; ++i) sp.slot[i] = static_cast<int32_t>(i);
    sp.coef.resize(count * sp.bs2);
    origins.clear();
    origins.reserve(count);
    for (int r = 0; r < sp.origins_h; ++r)
        for (int c = 0; c < sp.origins_w; ++c) origins.emplace_back(r, c);
    transform_origin_list(p, plan, sp, origins, threads);
}

void fill_spectra_used(BlockSpectra& sp, const Plane& p, const Transform2dPlan& plan,
                       const std::vector<BlockGroup>& groups, unsigned threads,
                       std::vector<std::pair<int, int>>& origins) {
    const int bs = plan.n;
    sp.origins_h = p.height - bs + 1;
    sp.origins_w = p.width - bs + 1;
    sp.bs2 = bs * bs;
    sp.slot.assign(static_cast<size_t>(sp.origins_h) * sp.origins_w, -1);
    origins.clear();
    for (const BlockGroup& g : groups)
        for (auto [r, c] : g.members) {
            int32_t& s = sp.slot[static_cast<size_t>(r) * sp.origins_w + c];
            if (s < 0) {
                s = static_cast<int32_t>(origins.size());
                origins.emplace_back(r, c);
            }
        }
    sp.coef.resize(origins.size() * static_cast<size_t>(sp.bs2));
    transform_origin_list(p, plan, sp, origins, threads);
}

// Scratch tables reused across stage invocations on the same thread; each
// call rewrites what it reads, so contents never leak between runs.
struct StageWorkspace {
    BlockSpectra noisy_sp, basic_sp, match_sp;
    std::vector<std::pair<int, int>> origins;
    std::vector<double> acc_spec, acc_pix, acc_w;
};

StageWorkspace& stage_workspace() {
    static thread_local StageWorkspace ws;
    return ws;
}

// hard-threshold every coefficient; used for matching under heavy noise
void prefilter_spectra(BlockSpectra& sp, double threshold) {
    for (double& v : sp.coef)
        if (std::abs(v) < threshold) v = 0.0;
}

// ------------------------------------------------------------- distances

// squared difference, unnormalized; branchless so the row loops vectorize
double block_sqdiff_raw(const Plane& p, int r1, int c1, int r2, int c2, int bs) {
    double sum = 0.0;
    for (int i = 0; i < bs; ++i) {
        const double* a = p.row(r1 + i) + c1;
        const double* b = p.row(r2 + i) + c2;
        double row_sum = 0.0;
        for (int j = 0; j < bs; ++j) {
            const double diff = a[j] - b[j];
            row_sum += diff * diff;
        }
        sum += row_sum;
    }
    return sum;
}

double block_sqdiff_spectra(const double* a, const double* b, int bs2, double limit) {
    double sum = 0.0;
    for (int k = 0; k < bs2; ++k) {
        const double diff = a[k] - b[k];
        sum += diff * diff;
        if (sum > limit) return std::numeric_limits<double>::infinity();
    }
    return sum;
}

// -------------------------------------------------------------- grouping

struct MatchContext {
    const Plane* plane = nullptr;           // raw-pixel matching
    const BlockSpectra* spectra = nullptr;  // prefiltered matching
    int bs = 0;
    int window = 0;
    int max_group = 0;
    double threshold = 0.0;  // normalized per-pixel
};

BlockGroup match_one(const MatchContext& ctx, int rr, int rc,
                     std::vector<std::tuple<double, int, int>>& cand) {
    const int bs = ctx.bs;
    const int h = ctx.plane->height, w = ctx.plane->width;
    const int w2 = (ctx.window - 1) / 2;
    const int r_lo = std::max(0, rr - w2), r_hi = std::min(h - bs, rr + w2);
    const int c_lo = std::max(0, rc - w2), c_hi = std::min(w - bs, rc + w2);
    const double area = static_cast<double>(bs) * bs;
    const double limit = ctx.threshold * area;

    cand.clear();
    for (int qr = r_lo; qr <= r_hi; ++qr)
        for (int qc = c_lo; qc <= c_hi; ++qc) {
            if (qr == rr && qc == rc) continue;
            const double d = ctx.spectra
                                 ? block_sqdiff_spectra(ctx.spectra->at(rr, rc),
                                                        ctx.spectra->at(qr, qc), bs * bs, limit)
                                 : block_sqdiff_raw(*ctx.plane, rr, rc, qr, qc, bs);
            if (d < limit) cand.emplace_back(d / area, qr, qc);
        }

    const size_t keep = std::min(cand.size(), static_cast<size_t>(ctx.max_group - 1));
    if (keep < cand.size()) {
        std::partial_sort(cand.begin(), cand.begin() + keep, cand.end());
        cand.resize(keep);
    } else {
        std::sort(cand.begin(), cand.end());
    }

    BlockGroup g;
    g.ref_row = rr;
    g.ref_col = rc;
    const int count = pow2_floor(static_cast<int>(cand.size()) + 1);
    g.members.reserve(count);
    g.distances.reserve(count);
    g.members.emplace_back(rr, rc);
    g.distances.push_back(0.0);
    for (int i = 0; i < count - 1; ++i) {
        g.members.emplace_back(std::get<1>(cand[i]), std::get<2>(cand[i]));
        g.distances.push_back(std::get<0>(cand[i]));
    }
    return g;
}

std::vector<BlockGroup> compute_groups(const MatchContext& ctx, const std::vector<int>& grid_rows,
                                       const std::vector<int>& grid_cols, unsigned threads) {
    std::vector<BlockGroup> groups(grid_rows.size() * grid_cols.size());
    parallel_for(0, static_cast<int>(grid_rows.size()), threads, [&](int ri) {
        std::vector<std::tuple<double, int, int>> cand;
        cand.reserve(static_cast<size_t>(ctx.window) * ctx.window);
        for (size_t ci = 0; ci < grid_cols.size(); ++ci)
            groups[ri * grid_cols.size() + ci] = match_one(ctx, grid_rows[ri], grid_cols[ci], cand);
    });
    return groups;
}

// ------------------------------------------------------------ stage engine

struct RowOutput {
    std::vector<double> values;   // filtered member spectra, group by group
    std::vector<double> weights;  // one aggregation weight per group
};

enum class StageKind { HardThreshold, Wiener };

void filter_row(StageKind kind, const std::vector<BlockGroup>& groups, size_t g_begin, size_t g_end,
                const BlockSpectra& noisy_sp, const BlockSpectra* basic_sp, double sigma,
                const DenoiseProfile& profile, RowOutput& out) {
    const int bs2 = noisy_sp.bs2;
    size_t total = 0;
    for (size_t g = g_begin; g < g_end; ++g) total += groups[g].members.size() * bs2;
    out.values.resize(total);
    out.weights.resize(g_end - g_begin);

    const int max_n = profile.max_group(kind == StageKind::HardThreshold ? MatchStage::HardThreshold
                                                                         : MatchStage::Wiener);
    // stacks are member-major so gathers and the across-stack transform
    // both run over contiguous spans
    std::vector<double> stack(static_cast<size_t>(max_n) * bs2);
    std::vector<double> pilot(static_cast<size_t>(max_n) * bs2);
    std::vector<double> scratch(static_cast<size_t>(std::max(max_n, 2)) * bs2);

    const double thr = profile.lambda_3d * sigma;
    const double sigma2 = sigma * sigma;

    size_t offset = 0;
    for (size_t g = g_begin; g < g_end; ++g) {
        const BlockGroup& grp = groups[g];
        const int n = static_cast<int>(grp.members.size());

        for (int m = 0; m < n; ++m) {
            const double* sp = noisy_sp.at(grp.members[m].first, grp.members[m].second);
            std::copy(sp, sp + bs2, stack.begin() + static_cast<size_t>(m) * bs2);
        }
        stack_forward_members(profile.transform_1d, stack.data(), n, bs2, scratch.data());

        double weight = 1.0;
        if (kind == StageKind::HardThreshold) {
            long retained = 0;
            for (size_t e = 0; e < static_cast<size_t>(n) * bs2; ++e) {
                if (std::abs(stack[e]) < thr)
                    stack[e] = 0.0;
                else
                    ++retained;
            }
            if (sigma > 0.0 && retained > 0) weight = 1.0 / (sigma2 * static_cast<double>(retained));
        } else {
            for (int m = 0; m < n; ++m) {
                const double* sp = basic_sp->at(grp.members[m].first, grp.members[m].second);
                std::copy(sp, sp + bs2, pilot.begin() + static_cast<size_t>(m) * bs2);
            }
            stack_forward_members(profile.transform_1d, pilot.data(), n, bs2, scratch.data());
            double sum_w2 = 0.0;
            if (sigma > 0.0) {
                for (size_t e = 0; e < static_cast<size_t>(n) * bs2; ++e) {
                    const double b2 = pilot[e] * pilot[e];
                    const double w = b2 / (b2 + sigma2);
                    stack[e] *= w;
                    sum_w2 += w * w;
                }
                if (sum_w2 > 0.0) weight = 1.0 / (sigma2 * sum_w2);
            }
        }

        stack_inverse_members(profile.transform_1d, stack.data(), n, bs2, scratch.data());

        // leave members in the 2D spectral domain; the aggregator inverts
        // once per distinct block origin
        std::copy(stack.begin(), stack.begin() + static_cast<size_t>(n) * bs2,
                  out.values.begin() + offset);
        offset += static_cast<size_t>(n) * bs2;
        out.weights[g - g_begin] = weight;
    }
}

StageResult run_stage(StageKind kind, const Plane& noisy, const Plane* basic, double sigma,
                      const DenoiseProfile& profile, const std::vector<BlockGroup>* groups_in,
                      unsigned threads) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw ValidationError("bm3d: sigma must be >= 0");
    profile.validate(noisy.width, noisy.height);
    if (!noisy.all_finite()) throw ValidationError("bm3d: non-finite sample in input");
    if (kind == StageKind::Wiener) {
        if (!basic->same_shape(noisy)) throw StructuralError("bm3d: basic/noisy shape mismatch");
        if (!basic->all_finite()) throw ValidationError("bm3d: non-finite sample in basic estimate");
    }

    const int bs = profile.block_size;
    const std::vector<int> grid_rows = reference_grid(noisy.height, bs, profile.step);
    const std::vector<int> grid_cols = reference_grid(noisy.width, bs, profile.step);
    for (size_t i = 1; i < grid_rows.size(); ++i)
        if (grid_rows[i] - grid_rows[i - 1] > bs)
            throw Error("bm3d: internal: stride grid leaves uncovered rows");
    for (size_t i = 1; i < grid_cols.size(); ++i)
        if (grid_cols[i] - grid_cols[i - 1] > bs)
            throw Error("bm3d: internal: stride grid leaves uncovered columns");

    const Transform2dPlan plan2d(profile.transform_2d, bs);
    const MatchStage mstage =
        kind == StageKind::HardThreshold ? MatchStage::HardThreshold : MatchStage::Wiener;
    StageWorkspace& ws = stage_workspace();

    StageResult result;
    if (groups_in) {
        for (const BlockGroup& g : *groups_in) {
            if (g.members.empty() || static_cast<int>(g.members.size()) > profile.max_group(mstage) ||
                !is_power_of_two(static_cast<int>(g.members.size())))
                throw ValidationError("bm3d: invalid reused group size");
            for (auto [r, c] : g.members)
                if (r < 0 || c < 0 || r + bs > noisy.height || c + bs > noisy.width)
                    throw ValidationError("bm3d: reused group member out of bounds");
        }
        result.groups = *groups_in;
    } else {
        const Plane& match_plane = kind == StageKind::HardThreshold ? noisy : *basic;
        MatchContext ctx;
        ctx.plane = &match_plane;
        ctx.bs = bs;
        ctx.window = profile.search_window;
        ctx.max_group = profile.max_group(mstage);
        ctx.threshold = profile.match_threshold(mstage);
        if (kind == StageKind::HardThreshold && sigma > 0.1) {
            // matching degrades under heavy noise; compare coarsely
            // DCT-thresholded blocks instead of raw pixels
            const Transform2dPlan dct_plan(Transform2d::Dct, bs);
            fill_spectra_dense(ws.match_sp, match_plane, dct_plan, threads, ws.origins);
            prefilter_spectra(ws.match_sp, 2.0 * sigma);
            ctx.spectra = &ws.match_sp;
        }
        result.groups = compute_groups(ctx, grid_rows, grid_cols, threads);
    }

    const auto prof_t0 = std::chrono::steady_clock::now();
    fill_spectra_used(ws.noisy_sp, noisy, plan2d, result.groups, threads, ws.origins);
    const BlockSpectra& noisy_sp = ws.noisy_sp;
    if (kind == StageKind::Wiener)
        fill_spectra_used(ws.basic_sp, *basic, plan2d, result.groups, threads, ws.origins);
    const BlockSpectra& basic_sp = ws.basic_sp;
    const auto prof_t1 = std::chrono::steady_clock::now();
    double prof_filter = 0.0, prof_agg = 0.0;

    // weighted spectra accumulate per distinct block origin; aggregation
    // is linear, so one inverse transform per origin suffices
    const int bs2 = bs * bs;
    const size_t n_origins = noisy_sp.coef.size() / bs2;
    ws.acc_spec.assign(n_origins * bs2, 0.0);
    ws.acc_w.assign(n_origins, 0.0);
    std::vector<double>& acc_spec = ws.acc_spec;
    std::vector<double>& acc_w = ws.acc_w;

    const int n_rows = static_cast<int>(grid_rows.size());
    const size_t cols = grid_cols.size();
    const int batch = std::max(1, static_cast<int>(resolve_threads(threads)) * 2);
    std::vector<RowOutput> row_out(std::min(batch, n_rows));

    for (int row0 = 0; row0 < n_rows; row0 += batch) {
        const int row1 = std::min(row0 + batch, n_rows);
        const auto prof_f0 = std::chrono::steady_clock::now();
        parallel_for(row0, row1, threads, [&](int ri) {
            filter_row(kind, result.groups, ri * cols, (ri + 1) * cols, noisy_sp,
                       kind == StageKind::Wiener ? &basic_sp : nullptr, sigma, profile,
                       row_out[ri - row0]);
        });
        const auto prof_f1 = std::chrono::steady_clock::now();
        prof_filter += std::chrono::duration<double>(prof_f1 - prof_f0).count();
        // fixed-order accumulation keeps the output independent of threading
        for (int ri = row0; ri < row1; ++ri) {
            const RowOutput& ro = row_out[ri - row0];
            size_t offset = 0;
            for (size_t ci = 0; ci < cols; ++ci) {
                const BlockGroup& grp = result.groups[ri * cols + ci];
                const double w = ro.weights[ci];
                for (auto [mr, mc] : grp.members) {
                    const int32_t slot = noisy_sp.slot[static_cast<size_t>(mr) * noisy_sp.origins_w + mc];
                    double* acc = acc_spec.data() + static_cast<size_t>(slot) * bs2;
                    const double* v = ro.values.data() + offset;
                    for (int k = 0; k < bs2; ++k) acc[k] += w * v[k];
                    acc_w[slot] += w;
                    offset += bs2;
                }
            }
        }
        prof_agg += std::chrono::duration<double>(std::chrono::steady_clock::now() - prof_f1).count();
    }

    // invert each accumulated origin spectrum, then scatter the weighted
    // pixel sums over the block footprints in a fixed origin order
    ws.acc_pix.resize(n_origins * bs2);
    std::vector<double>& acc_pix = ws.acc_pix;
    {
        const int chunk = 512;
        const int n_chunks = static_cast<int>((n_origins + chunk - 1) / chunk);
        parallel_for(0, n_chunks, threads, [&](int ci) {
            std::vector<double> scratch(2 * bs2);
            const size_t lo = static_cast<size_t>(ci) * chunk;
            const size_t hi = std::min(n_origins, lo + chunk);
            for (size_t s = lo; s < hi; ++s)
                plan2d.inverse(acc_spec.data() + s * bs2, acc_pix.data() + s * bs2, scratch.data());
        });
    }

    Plane num(noisy.width, noisy.height, 0.0);
    Plane den(noisy.width, noisy.height, 0.0);
    for (int r = 0; r < noisy_sp.origins_h; ++r)
        for (int c = 0; c < noisy_sp.origins_w; ++c) {
            const int32_t slot = noisy_sp.slot[static_cast<size_t>(r) * noisy_sp.origins_w + c];
            if (slot < 0) continue;
            const double* v = acc_pix.data() + static_cast<size_t>(slot) * bs2;
            const double w = acc_w[slot];
            for (int i = 0; i < bs; ++i) {
                double* nrow = num.row(r + i) + c;
                double* drow = den.row(r + i) + c;
                for (int j = 0; j < bs; ++j) {
                    nrow[j] += v[i * bs + j];
                    drow[j] += w;
                }
            }
        }

    static const bool profile_stages = std::getenv("PBM3D_PROFILE") != nullptr;
    if (profile_stages)
        std::fprintf(stderr, "[stage] spectra=%.3f filter=%.3f agg=%.3f\n",
                     std::chrono::duration<double>(prof_t1 - prof_t0).count(), prof_filter,
                     prof_agg);

    result.estimate = Plane(noisy.width, noisy.height);
    for (size_t k = 0; k < num.data.size(); ++k) {
        if (!(den.data[k] > 0.0)) throw Error("bm3d: internal: uncovered pixel in aggregation");
        result.estimate.data[k] = num.data[k] / den.data[k];
    }
    return result;
}

}  // namespace

void DenoiseProfile::validate(int width, int height) const {
    if (block_size < 4) throw ValidationError("DenoiseProfile: block_size must be >= 4");
    if (block_size > std::min(width, height))
        throw ValidationError("DenoiseProfile: block_size exceeds image dimensions");
    if (step < 1) throw ValidationError("DenoiseProfile: step must be >= 1");
    if (search_window < block_size)
        throw ValidationError("DenoiseProfile: search_window must be >= block_size");
    if (!is_power_of_two(max_group_ht) || !is_power_of_two(max_group_wie))
        throw ValidationError("DenoiseProfile: max group sizes must be powers of two");
    if (!(match_threshold_ht >= 0.0) || !(match_threshold_wie >= 0.0))
        throw ValidationError("DenoiseProfile: match thresholds must be >= 0");
    if (!(lambda_3d >= 0.0)) throw ValidationError("DenoiseProfile: lambda_3d must be >= 0");
    if (transform_2d == Transform2d::Bior15 && !is_power_of_two(block_size))
        throw ValidationError("DenoiseProfile: bior1.5 requires a power-of-two block_size");
}

std::vector<int> reference_grid(int extent, int block_size, int step) {
    std::vector<int> grid;
    const int last = extent - block_size;
    for (int o = 0; o < last; o += step) grid.push_back(o);
    grid.push_back(last);
    return grid;
}

BlockGroup block_match(const Plane& plane, int ref_row, int ref_col, const DenoiseProfile& profile,
                       MatchStage stage) {
    profile.validate(plane.width, plane.height);
    if (ref_row < 0 || ref_col < 0 || ref_row + profile.block_size > plane.height ||
        ref_col + profile.block_size > plane.width)
        throw ValidationError("block_match: reference block outside the plane");
    MatchContext ctx;
    ctx.plane = &plane;
    ctx.bs = profile.block_size;
    ctx.window = profile.search_window;
    ctx.max_group = profile.max_group(stage);
    ctx.threshold = profile.match_threshold(stage);
    std::vector<std::tuple<double, int, int>> cand;
    return match_one(ctx, ref_row, ref_col, cand);
}

StageResult stage1_hard_threshold(const Plane& noisy, double sigma, const DenoiseProfile& profile,
                                  const std::vector<BlockGroup>* groups_in, unsigned threads) {
    return run_stage(StageKind::HardThreshold, noisy, nullptr, sigma, profile, groups_in, threads);
}

StageResult stage2_wiener(const Plane& noisy, const Plane& basic, double sigma,
                          const DenoiseProfile& profile, const std::vector<BlockGroup>* groups_in,
                          unsigned threads) {
    return run_stage(StageKind::Wiener, noisy, &basic, sigma, profile, groups_in, threads);
}

Plane denoise_grayscale(const Plane& noisy, double sigma, const DenoiseProfile& profile,
                        unsigned threads) {
    StageResult basic = stage1_hard_threshold(noisy, sigma, profile, nullptr, threads);
    StageResult final = stage2_wiener(noisy, basic.estimate, sigma, profile, nullptr, threads);
    return std::move(final.estimate);
}

namespace testing {

void group_transform_roundtrip(std::vector<double>& stack, int n_members,
                               const DenoiseProfile& profile) {
    const int bs = profile.block_size;
    const int bs2 = bs * bs;
    const Transform2dPlan plan2d(profile.transform_2d, bs);
    std::vector<double> scratch(static_cast<size_t>(std::max(n_members, 2)) * bs2);
    std::vector<double> buf(bs2);

    for (int m = 0; m < n_members; ++m) {
        plan2d.forward(stack.data() + static_cast<size_t>(m) * bs2, buf.data(), scratch.data());
        std::copy(buf.begin(), buf.end(), stack.begin() + static_cast<size_t>(m) * bs2);
    }
    stack_forward_members(profile.transform_1d, stack.data(), n_members, bs2, scratch.data());
    stack_inverse_members(profile.transform_1d, stack.data(), n_members, bs2, scratch.data());
    for (int m = 0; m < n_members; ++m) {
        plan2d.inverse(stack.data() + static_cast<size_t>(m) * bs2, buf.data(), scratch.data());
        std::copy(buf.begin(), buf.end(), stack.begin() + static_cast<size_t>(m) * bs2);
    }
}

}  // namespace testing

}  // namespace pbm3d
