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

#pragma once

#include <span>
#include <string>
#include <vector>

#include "kgsr/kg/knowledge_graph.hpp"
#include "kgsr/types.hpp"

namespace kgsr::embed {

/// Translational embeddings: one row per entity, one per relation kind.
struct KgEmbeddings {
    Matrix entity;
    Matrix relation;

    int dim() const { return static_cast<int>(entity.cols()); }

    /// Uniform in [-6/sqrt(d), 6/sqrt(d)], entity rows projected onto the
    /// unit ball and relation rows scaled to unit length.
    static KgEmbeddings init(std::size_t entity_count, std::size_t relation_count, int dim, Rng& rng);
};

struct KgGradients {
    Matrix entity;
    Matrix relation;

    static KgGradients zeros_like(const KgEmbeddings& emb);
};

struct MarginConfig {
    double gamma = 1.0;
    double learning_rate = 0.01;
    int negatives_per_positive = 1;
};

struct NegativePair {
    kg::Triple positive;
    kg::Triple negative;
};

/// ||h + r - t||_2. Throws UnknownEntity / UnknownRelation.
double score_triple(const KgEmbeddings& emb, const kg::Triple& triple);

/// max(0, gamma + d_pos - d_neg).
double margin_loss(double d_pos, double d_neg, double gamma);

std::vector<NegativePair> sample_negative_pairs(const kg::KnowledgeGraph& graph, std::span<const kg::Triple> positives,
                                                int negatives_per_positive, Rng& rng);

/// scale * sum of hinge terms over `pairs`; adds scale * subgradient into
/// the gradient matrices when they are non-null. The subgradient is zero
/// at the hinge kink and for zero-length translation residuals.
double accumulate_margin_terms(const KgEmbeddings& emb, std::span<const NegativePair> pairs, double gamma,
                               double scale, Matrix* grad_entity, Matrix* grad_relation);

struct KgLossResult {
    double loss = 0.0;
    KgGradients gradients;
    std::vector<NegativePair> pairs;
};

/// Summed margin loss over every triple of the graph with freshly sampled
/// negatives, and its subgradient.
KgLossResult kg_loss_epoch(const KgEmbeddings& emb, const kg::KnowledgeGraph& graph, const MarginConfig& cfg,
                           Rng& rng);

/// Projects every entity row onto the unit L2 ball.
void renormalize_entities(Matrix& entity);

/// params - lr * grad, then entity renormalization. Throws ShapeMismatch.
KgEmbeddings sgd_step(const KgEmbeddings& emb, const KgGradients& grad, double learning_rate);

}  // namespace kgsr::embed
