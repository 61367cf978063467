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

#include <cmath>

#include "kgsr/error.hpp"
#include "kgsr/train/losses.hpp"

namespace kgsr::train {

LossBreakdown objective(const model::Model& m, const ObjectiveContext& ctx, const Batch& batch, model::Model* grads) {
    const auto& graph = *ctx.graph;
    const auto& tokens = *ctx.tokens;
    const auto& w = ctx.weights;
    const bool need_gat = !batch.clicks.empty();

    model::ForwardPass pass = model::forward(m, graph, tokens, need_gat);
    LossBreakdown out;
    Matrix d_final;
    Matrix d_semantic;

    if (need_gat) {
        const double inv = 1.0 / static_cast<double>(batch.clicks.size());
        if (grads) d_final = Matrix::Zero(pass.final_states.rows(), pass.final_states.cols());
        double sum = 0.0;
        for (const auto& ex : batch.clicks) {
            const auto hu = pass.final_states.row(ex.user);
            const auto ha = pass.final_states.row(ex.ad);
            const RowVector w_ha = (m.bilinear.w * ha.transpose()).transpose();
            const double logit = hu.dot(w_ha);
            const double p = model::logistic(logit);
            const double pc = std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp);
            sum -= ex.label ? std::log(pc) : std::log(1.0 - pc);
            if (grads && w.rec != 0.0 && pc == p) {
                const double d_logit = w.rec * inv * (p - static_cast<double>(ex.label));
                grads->bilinear.w.noalias() += d_logit * (hu.transpose() * ha);
                d_final.row(ex.user) += d_logit * w_ha;
                d_final.row(ex.ad).noalias() += d_logit * (hu * m.bilinear.w);
            }
        }
        out.rec = sum * inv;
    }

    if (!batch.kg_pairs.empty()) {
        const double inv = 1.0 / static_cast<double>(batch.kg_pairs.size());
        out.kg = embed::accumulate_margin_terms(m.kg, batch.kg_pairs, ctx.margin, inv, nullptr, nullptr);
        if (grads && w.kg != 0.0) {
            embed::accumulate_margin_terms(m.kg, batch.kg_pairs, ctx.margin, w.kg * inv, &grads->kg.entity,
                                           &grads->kg.relation);
        }
    }

    if (!batch.align_entities.empty()) {
        const double inv = 1.0 / static_cast<double>(batch.align_entities.size());
        if (grads) d_semantic = Matrix::Zero(pass.semantic.rows(), pass.semantic.cols());
        double sum = 0.0;
        for (EntityId e : batch.align_entities) {
            const RowVector r = m.kg.entity.row(e) - (m.projector * pass.semantic.row(e).transpose()).transpose();
            sum += r.squaredNorm();
            if (grads && w.align != 0.0) {
                const double c = 2.0 * w.align * inv;
                grads->kg.entity.row(e) += c * r;
                grads->projector.noalias() -= c * (r.transpose() * pass.semantic.row(e));
                d_semantic.row(e).noalias() -= c * (r * m.projector);
            }
        }
        out.align = sum * inv;
    }

    out.total = total_loss(out.rec, out.kg, out.align, w);
    if (grads) model::backward(m, graph, tokens, pass, d_final, d_semantic, *grads);
    return out;
}

model::Model compute_gradients(const model::Model& m, const ObjectiveContext& ctx, const Batch& batch,
                               LossBreakdown* loss) {
    model::Model grads = m.zeros_like();
    LossBreakdown l = objective(m, ctx, batch, &grads);
    if (loss) *loss = l;
    model::visit_blocks(grads, [](const std::string& name, const Matrix& b) {
        if (!b.allFinite()) throw Error(ErrorCode::NonFiniteGradient, "gradient block `" + name + "` is not finite");
    });
    return grads;
}

}  // namespace kgsr::train
