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

#include <string>
#include <vector>

#include "kgsr/embed/transe.hpp"
#include "kgsr/io/snapshot.hpp"
#include "kgsr/kg/knowledge_graph.hpp"
#include "kgsr/model/fusion_gnn.hpp"
#include "kgsr/text/encoder.hpp"

namespace kgsr::model {

struct ModelDims {
    int kg_dim = 32;
    int sem_dim = 32;
    int hidden_dim = 64;
    std::uint32_t vocab_size = text::kDefaultVocabSize;
    int gat_layers = 3;
};

/// Every learnable block of the recommender. A Model of zeros doubles as
/// the gradient container.
struct Model {
    embed::KgEmbeddings kg;
    text::EncoderParams encoder;
    FusionParams fusion;
    GatStack gat;
    BilinearParams bilinear;
    Matrix projector;  // d_k x d_s, maps semantic vectors into KG space for the alignment term

    static Model init(const ModelDims& dims, std::size_t entity_count, Rng& rng);
    Model zeros_like() const;
    ModelDims dims() const;

    std::vector<io::NamedBlock> to_blocks() const;
    /// Throws CorruptSnapshot on missing or misshapen blocks.
    static Model from_blocks(const std::vector<io::NamedBlock>& blocks);
};

/// Visits (name, matrix) for every learnable block in a fixed order.
template <typename M, typename Fn>
void visit_blocks(M& m, Fn&& fn) {
    fn(std::string("kg.entity"), m.kg.entity);
    fn(std::string("kg.relation"), m.kg.relation);
    fn(std::string("encoder.token_table"), m.encoder.token_table);
    fn(std::string("encoder.W_Q"), m.encoder.w_q);
    fn(std::string("encoder.W_K"), m.encoder.w_k);
    fn(std::string("encoder.W_V"), m.encoder.w_v);
    fn(std::string("fusion.W_f"), m.fusion.w);
    fn(std::string("fusion.b_f"), m.fusion.b);
    for (std::size_t l = 0; l < m.gat.layers.size(); ++l) {
        fn("gat." + std::to_string(l) + ".W_g", m.gat.layers[l].w);
        fn("gat." + std::to_string(l) + ".a", m.gat.layers[l].a);
    }
    fn(std::string("bilinear.W_r"), m.bilinear.w);
    fn(std::string("align.P"), m.projector);
}

void save_model(const std::string& path, const Model& m);
Model load_model(const std::string& path);

/// Intermediates of a full-graph forward pass.
struct ForwardPass {
    text::PackedAttention attention;
    Matrix semantic;      // N x d_s
    Matrix fusion_input;  // N x (d_k + d_s)
    Matrix fused;         // N x d_h, the vectors stored in the index
    std::vector<GatLayerCache> layers;
    Matrix final_states;  // N x d_h
};

/// Encodes every entity's tokens, fuses with its KG row and runs the GAT
/// stack over the whole graph. `tokens` has one sequence per entity.
ForwardPass forward(const Model& m, const kg::KnowledgeGraph& graph, const std::vector<text::TokenSeq>& tokens,
                    bool run_gat = true);

/// Fused vectors only (no GAT), for indexing and retrieval queries.
Matrix fused_embeddings(const Model& m, const std::vector<text::TokenSeq>& tokens);

/// Backpropagates d(loss)/d(final states) and an optional extra
/// d(loss)/d(semantic) through the GAT stack, fusion and encoder into
/// `grads`. Either upstream matrix may be empty.
void backward(const Model& m, const kg::KnowledgeGraph& graph, const std::vector<text::TokenSeq>& tokens,
              const ForwardPass& pass, const Matrix& d_final, const Matrix& d_semantic, Model& grads);

}  // namespace kgsr::model
