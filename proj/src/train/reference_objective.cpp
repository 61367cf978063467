// Copyright 2026 the kgsr authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kgsr/train/reference_objective.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace kgsr::train {

namespace {

using Real = long double;
using Vec = std::vector<Real>;
using Mat = std::vector<Vec>;

Mat to_mat(const Matrix& m) {
    Mat out(static_cast<std::size_t>(m.rows()), Vec(static_cast<std::size_t>(m.cols())));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
    return out;
}

// y = M x for M stored as rows.
Vec mat_vec(const Mat& m, const Vec& x) {
    Vec y(m.size(), 0.0L);
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j) y[i] += m[i][j] * x[j];
    return y;
}

// y = x M (row vector times matrix).
Vec vec_mat(const Vec& x, const Mat& m) {
    Vec y(m[0].size(), 0.0L);
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < y.size(); ++j) y[j] += x[i] * m[i][j];
    return y;
}

Real dot(const Vec& a, const Vec& b) {
    Real s = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

Vec encode_text(const text::TokenSeq& seq, const Mat& table, const Mat& wq, const Mat& wk, const Mat& wv) {
    const std::size_t len = seq.ids.size();
    const std::size_t d = wq.size();
    Mat q(len), k(len), v(len);
    for (std::size_t t = 0; t < len; ++t) {
        const Vec& x = table[seq.ids[t]];
        q[t] = vec_mat(x, wq);
        k[t] = vec_mat(x, wk);
        v[t] = vec_mat(x, wv);
    }
    const Real scale = 1.0L / std::sqrt(static_cast<Real>(d));
    Vec pooled(d, 0.0L);
    for (std::size_t i = 0; i < len; ++i) {
        Vec logits(len);
        for (std::size_t j = 0; j < len; ++j) logits[j] = scale * dot(q[i], k[j]);
        const Real mx = *std::max_element(logits.begin(), logits.end());
        Real sum = 0.0L;
        for (auto& l : logits) {
            l = std::exp(l - mx);
            sum += l;
        }
        for (std::size_t j = 0; j < len; ++j)
            for (std::size_t c = 0; c < d; ++c) pooled[c] += (logits[j] / sum) * v[j][c];
    }
    for (auto& p : pooled) p /= static_cast<Real>(len);
    return pooled;
}

Real leaky(Real x, Real slope) { return x > 0.0L ? x : slope * x; }

}  // namespace

long double reference_objective(const model::Model& m, const ObjectiveContext& ctx, const Batch& batch) {
    const auto& graph = *ctx.graph;
    const auto& tokens = *ctx.tokens;
    const std::size_t n = graph.entity_count();

    const Mat entity = to_mat(m.kg.entity);
    const Mat relation = to_mat(m.kg.relation);
    const Mat table = to_mat(m.encoder.token_table);
    const Mat wq = to_mat(m.encoder.w_q), wk = to_mat(m.encoder.w_k), wv = to_mat(m.encoder.w_v);
    const Mat wf = to_mat(m.fusion.w);
    const Vec bf = to_mat(m.fusion.b)[0];
    const Mat wr = to_mat(m.bilinear.w);
    const Mat proj = to_mat(m.projector);

    Mat sem(n);
    for (std::size_t e = 0; e < n; ++e) sem[e] = encode_text(tokens[e], table, wq, wk, wv);

    Real rec = 0.0L;
    if (!batch.clicks.empty()) {
        Mat h(n);
        for (std::size_t e = 0; e < n; ++e) {
            Vec joined = entity[e];
            joined.insert(joined.end(), sem[e].begin(), sem[e].end());
            Vec z = mat_vec(wf, joined);
            for (std::size_t c = 0; c < z.size(); ++c) z[c] = std::tanh(z[c] + bf[c]);
            h[e] = std::move(z);
        }
        for (const auto& layer : m.gat.layers) {
            const Mat w = to_mat(layer.w);
            const Vec a = to_mat(layer.a)[0];
            const std::size_t d = w.size();
            const Vec a_self(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(d));
            const Vec a_nbr(a.begin() + static_cast<std::ptrdiff_t>(d), a.end());
            Mat g(n);
            for (std::size_t e = 0; e < n; ++e) g[e] = mat_vec(w, h[e]);
            Mat next(n, Vec(d, 0.0L));
            for (std::size_t i = 0; i < n; ++i) {
                const auto nbrs = graph.neighbor_ids(static_cast<EntityId>(i));
                if (nbrs.empty()) {
                    for (std::size_t c = 0; c < d; ++c) next[i][c] = std::tanh(g[i][c]);
                    continue;
                }
                Vec logits;
                for (EntityId j : nbrs) logits.push_back(leaky(dot(a_self, g[i]) + dot(a_nbr, g[j]), layer.leaky_slope));
                const Real mx = *std::max_element(logits.begin(), logits.end());
                Real sum = 0.0L;
                for (auto& l : logits) {
                    l = std::exp(l - mx);
                    sum += l;
                }
                Vec acc(d, 0.0L);
                for (std::size_t k = 0; k < nbrs.size(); ++k)
                    for (std::size_t c = 0; c < d; ++c) acc[c] += (logits[k] / sum) * g[nbrs[k]][c];
                for (std::size_t c = 0; c < d; ++c) next[i][c] = std::tanh(acc[c]);
            }
            h = std::move(next);
        }
        const Real lo = kProbabilityClamp;
        const Real hi = 1.0L - kProbabilityClamp;
        for (const auto& ex : batch.clicks) {
            const Real logit = dot(h[ex.user], mat_vec(wr, h[ex.ad]));
            const Real p = std::clamp(1.0L / (1.0L + std::exp(-logit)), lo, hi);
            rec -= ex.label ? std::log(p) : std::log(1.0L - p);
        }
        rec /= static_cast<Real>(batch.clicks.size());
    }

    Real kg_loss = 0.0L;
    if (!batch.kg_pairs.empty()) {
        auto dist = [&](const kg::Triple& t) {
            Real s = 0.0L;
            const auto& r = relation[static_cast<std::size_t>(t.relation)];
            for (std::size_t c = 0; c < r.size(); ++c) {
                const Real x = entity[t.head][c] + r[c] - entity[t.tail][c];
                s += x * x;
            }
            return std::sqrt(s);
        };
        for (const auto& pair : batch.kg_pairs) {
            kg_loss += std::max(0.0L, static_cast<Real>(ctx.margin) + dist(pair.positive) - dist(pair.negative));
        }
        kg_loss /= static_cast<Real>(batch.kg_pairs.size());
    }

    Real align = 0.0L;
    if (!batch.align_entities.empty()) {
        for (EntityId e : batch.align_entities) {
            const Vec pe = mat_vec(proj, sem[e]);
            for (std::size_t c = 0; c < pe.size(); ++c) {
                const Real r = entity[e][c] - pe[c];
                align += r * r;
            }
        }
        align /= static_cast<Real>(batch.align_entities.size());
    }

    const auto& w = ctx.weights;
    return static_cast<Real>(w.rec) * rec + static_cast<Real>(w.kg) * kg_loss + static_cast<Real>(w.align) * align;
}

}  // namespace kgsr::train
