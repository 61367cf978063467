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

#include "kgsr/model/model.hpp"

#include <map>

#include "kgsr/error.hpp"
#include "kgsr/io/binary.hpp"

namespace kgsr::model {

Model Model::init(const ModelDims& dims, std::size_t entity_count, Rng& rng) {
    Model m;
    m.kg = embed::KgEmbeddings::init(entity_count, kg::kRelationKindCount, dims.kg_dim, rng);
    m.encoder = text::EncoderParams::init(dims.vocab_size, dims.sem_dim, rng);
    m.fusion = FusionParams::init(dims.kg_dim, dims.sem_dim, dims.hidden_dim, rng);
    m.gat = GatStack::init(dims.hidden_dim, dims.gat_layers, rng);
    m.bilinear = BilinearParams::init(dims.hidden_dim, rng);
    m.projector.resize(dims.kg_dim, dims.sem_dim);
    const double bound = std::sqrt(6.0 / (dims.kg_dim + dims.sem_dim));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (Eigen::Index i = 0; i < m.projector.size(); ++i) m.projector.data()[i] = u(rng);
    return m;
}

Model Model::zeros_like() const {
    Model z = *this;
    visit_blocks(z, [](const std::string&, Matrix& b) { b.setZero(); });
    return z;
}

ModelDims Model::dims() const {
    ModelDims d;
    d.kg_dim = static_cast<int>(kg.entity.cols());
    d.sem_dim = encoder.dim();
    d.hidden_dim = static_cast<int>(fusion.w.rows());
    d.vocab_size = encoder.vocab_size();
    d.gat_layers = static_cast<int>(gat.layers.size());
    return d;
}

std::vector<io::NamedBlock> Model::to_blocks() const {
    std::vector<io::NamedBlock> blocks;
    visit_blocks(*this, [&](const std::string& name, const Matrix& b) { blocks.push_back({name, b}); });
    for (std::size_t l = 0; l < gat.layers.size(); ++l) {
        blocks.push_back({"gat." + std::to_string(l) + ".leaky_slope", Matrix::Constant(1, 1, gat.layers[l].leaky_slope)});
    }
    return blocks;
}

Model Model::from_blocks(const std::vector<io::NamedBlock>& blocks) {
    std::map<std::string, const Matrix*> by_name;
    for (const auto& b : blocks) by_name[b.name] = &b.value;
    auto take = [&](const std::string& name) -> const Matrix& {
        auto it = by_name.find(name);
        if (it == by_name.end()) throw Error(ErrorCode::CorruptSnapshot, "model snapshot lacks block `" + name + "`");
        return *it->second;
    };
    Model m;
    std::size_t layers = 0;
    while (by_name.count("gat." + std::to_string(layers) + ".W_g")) ++layers;
    m.gat.layers.resize(layers);
    visit_blocks(m, [&](const std::string& name, Matrix& b) { b = take(name); });
    for (std::size_t l = 0; l < layers; ++l) {
        const auto& slope = take("gat." + std::to_string(l) + ".leaky_slope");
        if (slope.size() != 1) throw Error(ErrorCode::CorruptSnapshot, "leaky_slope block must be 1x1");
        m.gat.layers[l].leaky_slope = slope(0, 0);
    }
    const auto dk = m.kg.entity.cols();
    const auto ds = m.encoder.token_table.cols();
    const auto dh = m.fusion.w.rows();
    bool ok = m.kg.relation.cols() == dk && m.encoder.w_q.rows() == ds && m.encoder.w_q.cols() == ds &&
              m.encoder.w_k.rows() == ds && m.encoder.w_k.cols() == ds && m.encoder.w_v.rows() == ds &&
              m.encoder.w_v.cols() == ds && m.fusion.w.cols() == dk + ds && m.fusion.b.rows() == 1 &&
              m.fusion.b.cols() == dh && m.bilinear.w.rows() == dh && m.bilinear.w.cols() == dh &&
              m.projector.rows() == dk && m.projector.cols() == ds;
    for (const auto& layer : m.gat.layers) {
        ok = ok && layer.w.rows() == dh && layer.w.cols() == dh && layer.a.rows() == 1 && layer.a.cols() == 2 * dh;
    }
    if (!ok) throw Error(ErrorCode::CorruptSnapshot, "model snapshot blocks have inconsistent shapes");
    return m;
}

void save_model(const std::string& path, const Model& m) { io::write_file(path, io::encode_sections(m.to_blocks())); }

Model load_model(const std::string& path) { return Model::from_blocks(io::decode_sections(io::read_file(path))); }

namespace {

Matrix semantic_rows(const Model& m, const std::vector<text::TokenSeq>& tokens, text::PackedAttention* cache) {
    return text::encode_all(tokens, m.encoder, cache);
}

Matrix concat_inputs(const Model& m, const Matrix& sem) {
    Matrix in(sem.rows(), m.kg.entity.cols() + sem.cols());
    in.leftCols(m.kg.entity.cols()) = m.kg.entity;
    in.rightCols(sem.cols()) = sem;
    return in;
}

}  // namespace

ForwardPass forward(const Model& m, const kg::KnowledgeGraph& graph, const std::vector<text::TokenSeq>& tokens,
                    bool run_gat) {
    if (tokens.size() != graph.entity_count() || static_cast<std::size_t>(m.kg.entity.rows()) != tokens.size()) {
        throw Error(ErrorCode::ShapeMismatch, "model rows, token sequences and graph entities disagree");
    }
    ForwardPass pass;
    pass.semantic = semantic_rows(m, tokens, &pass.attention);
    pass.fusion_input = concat_inputs(m, pass.semantic);
    pass.fused = fuse_rows(pass.fusion_input, m.fusion);
    if (run_gat) pass.final_states = forward_stack(graph, pass.fused, m.gat, &pass.layers);
    return pass;
}

Matrix fused_embeddings(const Model& m, const std::vector<text::TokenSeq>& tokens) {
    if (static_cast<std::size_t>(m.kg.entity.rows()) != tokens.size()) {
        throw Error(ErrorCode::ShapeMismatch, "model rows and token sequences disagree");
    }
    return fuse_rows(concat_inputs(m, semantic_rows(m, tokens, nullptr)), m.fusion);
}

void backward(const Model& m, const kg::KnowledgeGraph& graph, const std::vector<text::TokenSeq>& tokens,
              const ForwardPass& pass, const Matrix& d_final, const Matrix& d_semantic, Model& grads) {
    const auto n = pass.fused.rows();
    const auto dk = m.kg.entity.cols();
    const auto ds = m.encoder.token_table.cols();

    Matrix d_sem = d_semantic.size() ? d_semantic : Matrix::Zero(n, ds);
    if (d_final.size()) {
        Matrix d_state = d_final;
        for (std::size_t l = m.gat.layers.size(); l-- > 0;) {
            GatLayerGradients g{Matrix::Zero(m.gat.layers[l].w.rows(), m.gat.layers[l].w.cols()),
                                Matrix::Zero(1, m.gat.layers[l].a.cols())};
            d_state = gat_layer_backward(graph, m.gat.layers[l], pass.layers[l], d_state, g);
            grads.gat.layers[l].w += g.w;
            grads.gat.layers[l].a += g.a;
        }
        // Through the fusion tanh.
        Matrix d_pre = (d_state.array() * (1.0 - pass.fused.array().square())).matrix();
        grads.fusion.w.noalias() += d_pre.transpose() * pass.fusion_input;
        grads.fusion.b += d_pre.colwise().sum();
        Matrix d_in = d_pre * m.fusion.w;
        grads.kg.entity += d_in.leftCols(dk);
        d_sem += d_in.rightCols(ds);
    }

    text::EncoderGradients eg{std::move(grads.encoder.token_table), std::move(grads.encoder.w_q),
                              std::move(grads.encoder.w_k), std::move(grads.encoder.w_v)};
    text::encode_all_backward(tokens, m.encoder, pass.attention, d_sem, eg);
    grads.encoder.token_table = std::move(eg.token_table);
    grads.encoder.w_q = std::move(eg.w_q);
    grads.encoder.w_k = std::move(eg.w_k);
    grads.encoder.w_v = std::move(eg.w_v);
}

}  // namespace kgsr::model
