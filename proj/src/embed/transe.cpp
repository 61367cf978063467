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

#include "kgsr/embed/transe.hpp"

#include <cmath>

#include "kgsr/error.hpp"

namespace kgsr::embed {

namespace {

void check_triple(const KgEmbeddings& emb, const kg::Triple& t) {
    if (t.head >= emb.entity.rows() || t.tail >= emb.entity.rows()) {
        throw Error(ErrorCode::UnknownEntity, "triple endpoint has no embedding row");
    }
    if (static_cast<Eigen::Index>(t.relation) >= emb.relation.rows()) {
        throw Error(ErrorCode::UnknownRelation, "relation has no embedding row");
    }
}

RowVector residual(const KgEmbeddings& emb, const kg::Triple& t) {
    return emb.entity.row(t.head) + emb.relation.row(static_cast<Eigen::Index>(t.relation)) - emb.entity.row(t.tail);
}

void add_distance_grad(const RowVector& res, double norm, double coeff, const kg::Triple& t, Matrix* ge, Matrix* gr) {
    if (norm == 0.0) return;
    const RowVector u = (coeff / norm) * res;
    if (ge) {
        ge->row(t.head) += u;
        ge->row(t.tail) -= u;
    }
    if (gr) gr->row(static_cast<Eigen::Index>(t.relation)) += u;
}

}  // namespace

KgEmbeddings KgEmbeddings::init(std::size_t entity_count, std::size_t relation_count, int dim, Rng& rng) {
    const double bound = 6.0 / std::sqrt(static_cast<double>(dim));
    std::uniform_real_distribution<double> u(-bound, bound);
    KgEmbeddings emb;
    emb.entity.resize(static_cast<Eigen::Index>(entity_count), dim);
    emb.relation.resize(static_cast<Eigen::Index>(relation_count), dim);
    for (Eigen::Index i = 0; i < emb.entity.size(); ++i) emb.entity.data()[i] = u(rng);
    for (Eigen::Index i = 0; i < emb.relation.size(); ++i) emb.relation.data()[i] = u(rng);
    renormalize_entities(emb.entity);
    for (Eigen::Index r = 0; r < emb.relation.rows(); ++r) {
        const double n = emb.relation.row(r).norm();
        if (n > 0.0) emb.relation.row(r) /= n;
    }
    return emb;
}

KgGradients KgGradients::zeros_like(const KgEmbeddings& emb) {
    return {Matrix::Zero(emb.entity.rows(), emb.entity.cols()), Matrix::Zero(emb.relation.rows(), emb.relation.cols())};
}

double score_triple(const KgEmbeddings& emb, const kg::Triple& triple) {
    check_triple(emb, triple);
    return residual(emb, triple).norm();
}

double margin_loss(double d_pos, double d_neg, double gamma) { return std::max(0.0, gamma + d_pos - d_neg); }

std::vector<NegativePair> sample_negative_pairs(const kg::KnowledgeGraph& graph, std::span<const kg::Triple> positives,
                                                int negatives_per_positive, Rng& rng) {
    std::vector<NegativePair> pairs;
    pairs.reserve(positives.size() * static_cast<std::size_t>(negatives_per_positive));
    for (const auto& p : positives) {
        for (int k = 0; k < negatives_per_positive; ++k) pairs.push_back({p, kg::sample_negative(graph, p, rng)});
    }
    return pairs;
}

double accumulate_margin_terms(const KgEmbeddings& emb, std::span<const NegativePair> pairs, double gamma,
                               double scale, Matrix* grad_entity, Matrix* grad_relation) {
    double total = 0.0;
    for (const auto& pair : pairs) {
        check_triple(emb, pair.positive);
        check_triple(emb, pair.negative);
        const RowVector rp = residual(emb, pair.positive);
        const RowVector rn = residual(emb, pair.negative);
        const double dp = rp.norm();
        const double dn = rn.norm();
        const double hinge = gamma + dp - dn;
        if (hinge <= 0.0) continue;
        total += hinge;
        if (grad_entity || grad_relation) {
            add_distance_grad(rp, dp, scale, pair.positive, grad_entity, grad_relation);
            add_distance_grad(rn, dn, -scale, pair.negative, grad_entity, grad_relation);
        }
    }
    return scale * total;
}

KgLossResult kg_loss_epoch(const KgEmbeddings& emb, const kg::KnowledgeGraph& graph, const MarginConfig& cfg,
                           Rng& rng) {
    if (graph.triple_count() == 0) throw Error(ErrorCode::EmptyBatch, "graph has no triples");
    if (cfg.gamma <= 0.0) throw Error(ErrorCode::InvalidConfig, "margin gamma must be positive");
    KgLossResult result;
    result.gradients = KgGradients::zeros_like(emb);
    result.pairs = sample_negative_pairs(graph, graph.triples(), cfg.negatives_per_positive, rng);
    result.loss = accumulate_margin_terms(emb, result.pairs, cfg.gamma, 1.0, &result.gradients.entity,
                                          &result.gradients.relation);
    return result;
}

void renormalize_entities(Matrix& entity) {
    for (Eigen::Index r = 0; r < entity.rows(); ++r) {
        const double n = entity.row(r).norm();
        if (n > 1.0) entity.row(r) /= n;
    }
}

KgEmbeddings sgd_step(const KgEmbeddings& emb, const KgGradients& grad, double learning_rate) {
    if (grad.entity.rows() != emb.entity.rows() || grad.entity.cols() != emb.entity.cols() ||
        grad.relation.rows() != emb.relation.rows() || grad.relation.cols() != emb.relation.cols()) {
        throw Error(ErrorCode::ShapeMismatch, "gradient shape does not match embeddings");
    }
    KgEmbeddings next{emb.entity - learning_rate * grad.entity, emb.relation - learning_rate * grad.relation};
    renormalize_entities(next.entity);
    return next;
}

}  // namespace kgsr::embed
