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

#include "kgsr/model/fusion_gnn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kgsr/error.hpp"

namespace kgsr::model {

namespace {

void fill_uniform(Matrix& m, double bound, Rng& rng) {
    std::uniform_real_distribution<double> u(-bound, bound);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
}

double xavier(Eigen::Index fan_in, Eigen::Index fan_out) {
    return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

}  // namespace

FusionParams FusionParams::init(int d_k, int d_s, int d_h, Rng& rng) {
    FusionParams p{Matrix(d_h, d_k + d_s), Matrix::Zero(1, d_h)};
    fill_uniform(p.w, xavier(d_k + d_s, d_h), rng);
    return p;
}

GatLayerParams GatLayerParams::init(int d_h, Rng& rng) {
    GatLayerParams p{Matrix(d_h, d_h), Matrix(1, 2 * d_h), 0.2};
    fill_uniform(p.w, xavier(d_h, d_h), rng);
    fill_uniform(p.a, xavier(2 * d_h, 1), rng);
    return p;
}

GatStack GatStack::init(int d_h, int depth, Rng& rng) {
    GatStack s;
    for (int l = 0; l < depth; ++l) s.layers.push_back(GatLayerParams::init(d_h, rng));
    return s;
}

BilinearParams BilinearParams::init(int d_h, Rng& rng) {
    BilinearParams p{Matrix(d_h, d_h)};
    fill_uniform(p.w, xavier(d_h, d_h), rng);
    return p;
}

FusedEmbedding fuse(const Vector& h_kg, const Vector& e_sem, const FusionParams& params, EntityId entity) {
    if (h_kg.size() + e_sem.size() != params.w.cols()) {
        throw Error(ErrorCode::ShapeMismatch, "fusion input width " + std::to_string(h_kg.size() + e_sem.size()) +
                                                  " != " + std::to_string(params.w.cols()));
    }
    Vector joined(h_kg.size() + e_sem.size());
    joined << h_kg, e_sem;
    Vector pre = params.w * joined + params.b.transpose();
    return {pre.array().tanh().matrix(), entity};
}

Matrix fuse_rows(const Matrix& inputs, const FusionParams& params) {
    if (inputs.cols() != params.w.cols()) throw Error(ErrorCode::ShapeMismatch, "fusion input width mismatch");
    Matrix pre = inputs * params.w.transpose();
    pre.rowwise() += params.b.row(0);
    return pre.array().tanh().matrix();
}

double leaky_relu(double x, double slope) { return x > 0.0 ? x : slope * x; }

std::vector<double> attention_coeffs(const std::vector<Vector>& neighbor_states, const Vector& self_state,
                                     const GatLayerParams& params) {
    if (neighbor_states.empty()) throw Error(ErrorCode::IsolatedNode, "attention over an empty neighborhood");
    const auto d = params.w.rows();
    const Vector wi = params.w * self_state;
    const double self_term = params.a.leftCols(d).row(0).dot(wi.transpose());
    std::vector<double> logits;
    logits.reserve(neighbor_states.size());
    for (const auto& h : neighbor_states) {
        const Vector wj = params.w * h;
        logits.push_back(leaky_relu(self_term + params.a.rightCols(d).row(0).dot(wj.transpose()), params.leaky_slope));
    }
    const double m = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (auto& l : logits) {
        l = std::exp(l - m);
        sum += l;
    }
    for (auto& l : logits) l /= sum;
    return logits;
}

Matrix gat_layer(const kg::KnowledgeGraph& graph, const Matrix& states, const GatLayerParams& params,
                 GatLayerCache* cache) {
    const auto n = static_cast<Eigen::Index>(graph.entity_count());
    if (states.rows() != n) {
        throw Error(ErrorCode::MissingState, "state rows " + std::to_string(states.rows()) + " do not cover " +
                                                 std::to_string(n) + " graph nodes");
    }
    if (states.cols() != params.w.cols()) throw Error(ErrorCode::ShapeMismatch, "state width mismatch");
    const auto d = params.w.rows();

    Matrix projected = states * params.w.transpose();
    const Vector self_score = projected * params.a.leftCols(d).transpose();
    const Vector nbr_score = projected * params.a.rightCols(d).transpose();

    std::vector<std::size_t> offsets(static_cast<std::size_t>(n) + 1, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
        offsets[static_cast<std::size_t>(i) + 1] =
            offsets[static_cast<std::size_t>(i)] + graph.neighbor_ids(static_cast<EntityId>(i)).size();
    }
    std::vector<double> pre(offsets.back());
    std::vector<double> alpha(offsets.back());

    Matrix mixed(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto nbrs = graph.neighbor_ids(static_cast<EntityId>(i));
        if (nbrs.empty()) {
            mixed.row(i) = projected.row(i);
            continue;
        }
        const std::size_t base = offsets[static_cast<std::size_t>(i)];
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t e = 0; e < nbrs.size(); ++e) {
            pre[base + e] = self_score(i) + nbr_score(nbrs[e]);
            alpha[base + e] = leaky_relu(pre[base + e], params.leaky_slope);
            m = std::max(m, alpha[base + e]);
        }
        double sum = 0.0;
        for (std::size_t e = 0; e < nbrs.size(); ++e) {
            alpha[base + e] = std::exp(alpha[base + e] - m);
            sum += alpha[base + e];
        }
        auto row = mixed.row(i);
        row.setZero();
        for (std::size_t e = 0; e < nbrs.size(); ++e) {
            alpha[base + e] /= sum;
            row.noalias() += alpha[base + e] * projected.row(nbrs[e]);
        }
    }
    Matrix out = mixed.array().tanh().matrix();
    if (cache) {
        cache->input = states;
        cache->projected = std::move(projected);
        cache->output = out;
        cache->edge_offsets = std::move(offsets);
        cache->pre_activation = std::move(pre);
        cache->alpha = std::move(alpha);
    }
    return out;
}

Matrix forward_stack(const kg::KnowledgeGraph& graph, const Matrix& initial, const GatStack& stack,
                     std::vector<GatLayerCache>* caches) {
    if (caches) caches->assign(stack.layers.size(), {});
    Matrix h = initial;
    for (std::size_t l = 0; l < stack.layers.size(); ++l) {
        h = gat_layer(graph, h, stack.layers[l], caches ? &(*caches)[l] : nullptr);
    }
    return h;
}

Matrix gat_layer_backward(const kg::KnowledgeGraph& graph, const GatLayerParams& params, const GatLayerCache& cache,
                          const Matrix& d_output, GatLayerGradients& grads) {
    const auto n = cache.input.rows();
    const auto d = params.w.rows();
    // Through tanh.
    Matrix d_mixed = (d_output.array() * (1.0 - cache.output.array().square())).matrix();
    Matrix d_projected = Matrix::Zero(n, d);
    Vector d_self_score = Vector::Zero(n);
    Vector d_nbr_score = Vector::Zero(n);

    std::vector<double> d_alpha;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto nbrs = graph.neighbor_ids(static_cast<EntityId>(i));
        if (nbrs.empty()) {
            d_projected.row(i) += d_mixed.row(i);
            continue;
        }
        const std::size_t base = cache.edge_offsets[static_cast<std::size_t>(i)];
        d_alpha.assign(nbrs.size(), 0.0);
        double weighted = 0.0;
        for (std::size_t e = 0; e < nbrs.size(); ++e) {
            const double a = cache.alpha[base + e];
            d_projected.row(nbrs[e]).noalias() += a * d_mixed.row(i);
            d_alpha[e] = d_mixed.row(i).dot(cache.projected.row(nbrs[e]));
            weighted += a * d_alpha[e];
        }
        for (std::size_t e = 0; e < nbrs.size(); ++e) {
            const double d_logit = cache.alpha[base + e] * (d_alpha[e] - weighted);
            const double d_pre = cache.pre_activation[base + e] > 0.0 ? d_logit : params.leaky_slope * d_logit;
            d_self_score(i) += d_pre;
            d_nbr_score(nbrs[e]) += d_pre;
        }
    }
    // self_score = P a_self^T, nbr_score = P a_nbr^T.
    grads.a.leftCols(d).noalias() += d_self_score.transpose() * cache.projected;
    grads.a.rightCols(d).noalias() += d_nbr_score.transpose() * cache.projected;
    d_projected.noalias() += d_self_score * params.a.leftCols(d);
    d_projected.noalias() += d_nbr_score * params.a.rightCols(d);
    // projected = input W^T.
    grads.w.noalias() += d_projected.transpose() * cache.input;
    return d_projected * params.w;
}

double logistic(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double predict_score(const Vector& h_user, const Vector& h_ad, const BilinearParams& params) {
    if (h_user.size() != params.w.rows() || h_ad.size() != params.w.cols()) {
        throw Error(ErrorCode::ShapeMismatch, "bilinear operand width mismatch");
    }
    return logistic(h_user.dot(params.w * h_ad));
}

}  // namespace kgsr::model
