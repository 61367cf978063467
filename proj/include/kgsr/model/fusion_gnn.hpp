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

#include <vector>

#include "kgsr/kg/knowledge_graph.hpp"
#include "kgsr/types.hpp"

namespace kgsr::model {

/// z = tanh(W_f [h_kg ; e_sem] + b_f), KG part first.
struct FusionParams {
    Matrix w;  // d_h x (d_k + d_s)
    Matrix b;  // 1 x d_h

    static FusionParams init(int d_k, int d_s, int d_h, Rng& rng);
};

struct FusedEmbedding {
    Vector vector;
    EntityId entity = 0;
};

/// One graph-attention layer. Node i aggregates its distinct neighbors j
/// with softmax(LeakyReLU(a . [W h_i ; W h_j])) weights, then applies tanh.
struct GatLayerParams {
    Matrix w;  // d_h x d_h
    Matrix a;  // 1 x 2 d_h; first half scores the receiving node
    double leaky_slope = 0.2;

    static GatLayerParams init(int d_h, Rng& rng);
};

struct GatStack {
    std::vector<GatLayerParams> layers;

    static GatStack init(int d_h, int depth, Rng& rng);
};

struct BilinearParams {
    Matrix w;  // d_h x d_h

    static BilinearParams init(int d_h, Rng& rng);
};

/// Throws ShapeMismatch.
FusedEmbedding fuse(const Vector& h_kg, const Vector& e_sem, const FusionParams& params, EntityId entity = 0);

/// Fuses many rows at once; `inputs` holds [h_kg ; e_sem] per row.
Matrix fuse_rows(const Matrix& inputs, const FusionParams& params);

double leaky_relu(double x, double slope);

/// Attention weights of node i over its neighbors, in neighbor order.
/// Throws IsolatedNode for an empty neighborhood.
std::vector<double> attention_coeffs(const std::vector<Vector>& neighbor_states, const Vector& self_state,
                                     const GatLayerParams& params);

/// Per-layer intermediates kept for the backward pass. Edge arrays follow
/// the graph's neighbor_ids() order, node after node.
struct GatLayerCache {
    Matrix input;
    Matrix projected;  // input * W^T
    Matrix output;
    std::vector<std::size_t> edge_offsets;
    std::vector<double> pre_activation;  // logit before LeakyReLU
    std::vector<double> alpha;
};

/// States are a matrix with one row per graph entity. Isolated nodes fall
/// back to tanh(W h_i). Throws MissingState when rows do not cover the graph.
Matrix gat_layer(const kg::KnowledgeGraph& graph, const Matrix& states, const GatLayerParams& params,
                 GatLayerCache* cache = nullptr);

Matrix forward_stack(const kg::KnowledgeGraph& graph, const Matrix& initial, const GatStack& stack,
                     std::vector<GatLayerCache>* caches = nullptr);

struct GatLayerGradients {
    Matrix w;
    Matrix a;
};

/// Given d(loss)/d(output), accumulates parameter gradients and returns
/// d(loss)/d(input).
Matrix gat_layer_backward(const kg::KnowledgeGraph& graph, const GatLayerParams& params, const GatLayerCache& cache,
                          const Matrix& d_output, GatLayerGradients& grads);

double logistic(double x);

/// logistic(h_user^T W_r h_ad). Throws ShapeMismatch.
double predict_score(const Vector& h_user, const Vector& h_ad, const BilinearParams& params);

}  // namespace kgsr::model
