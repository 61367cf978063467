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

#include "kgsr/train/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "kgsr/error.hpp"
#include "kgsr/train/reference_objective.hpp"

namespace kgsr::train {

GradCheckReport finite_difference_check(const model::Model& m, const model::Model& analytic,
                                        const std::function<long double(const model::Model&)>& loss,
                                        const GradCheckOptions& options) {
    GradCheckReport report;
    model::Model probe = m;
    const long double f0 = loss(probe);

    std::vector<std::pair<std::string, const Matrix*>> analytic_blocks;
    model::visit_blocks(analytic, [&](const std::string& name, const Matrix& b) { analytic_blocks.emplace_back(name, &b); });

    std::size_t block_index = 0;
    model::visit_blocks(probe, [&](const std::string& name, Matrix& block) {
        const Matrix& grad = *analytic_blocks[block_index++].second;
        BlockCheck bc;
        bc.name = name;
        const auto size = static_cast<std::size_t>(block.size());
        std::size_t stride = 1;
        if (options.max_coords_per_block && size > options.max_coords_per_block) {
            stride = (size + options.max_coords_per_block - 1) / options.max_coords_per_block;
        }
        for (std::size_t i = 0; i < size; i += stride) {
            double& x = block.data()[i];
            const double saved = x;
            x = saved + options.epsilon;
            const long double fp = loss(probe);
            // The realized step, since saved +/- epsilon rounds in double.
            const long double step = static_cast<long double>(x) - (saved - options.epsilon);
            x = saved - options.epsilon;
            const long double fm = loss(probe);
            x = saved;

            const double numeric = static_cast<double>((fp - fm) / step);
            const double forward = static_cast<double>((fp - f0) / (step / 2));
            const double backward = static_cast<double>((f0 - fm) / (step / 2));
            const double a = grad.data()[i];
            if (std::abs(forward - backward) > 1e-3 * std::max(1.0, std::abs(numeric))) {
                ++bc.skipped_kink;
                continue;
            }
            const double scale = std::max(std::abs(a), std::abs(numeric));
            if (scale < options.min_magnitude) {
                ++bc.skipped_small;
                continue;
            }
            const double rel = std::abs(a - numeric) / scale;
            bc.max_rel_error = std::max(bc.max_rel_error, rel);
            ++bc.checked;
        }
        report.max_rel_error = std::max(report.max_rel_error, bc.max_rel_error);
        report.blocks.push_back(bc);
    });
    report.passed = report.max_rel_error < options.tolerance;
    return report;
}

ObjectiveContext TinyProblem::context() const { return {&graph, &tokens, weights, 1.0}; }

TinyProblem make_tiny_problem(std::uint64_t seed) {
    using kg::EntityKind;
    using kg::RelationKind;
    Rng rng(seed);
    TinyProblem p;

    // 3 users, 3 ads, 2 products, 1 category, 1 tag.
    std::vector<kg::Entity> entities = {
        {"u0", EntityKind::User, "u0"},    {"u1", EntityKind::User, "u1"},    {"u2", EntityKind::User, "u2"},
        {"a0", EntityKind::Ad, "a0"},      {"a1", EntityKind::Ad, "a1"},      {"a2", EntityKind::Ad, "a2"},
        {"p0", EntityKind::Product, "p0"}, {"p1", EntityKind::Product, "p1"}, {"c0", EntityKind::Category, "c0"},
        {"t0", EntityKind::InterestTag, "t0"},
    };
    std::vector<kg::Triple> triples = {
        {3, RelationKind::Promotes, 6},  {4, RelationKind::Promotes, 6}, {5, RelationKind::Promotes, 7},
        {6, RelationKind::BelongsTo, 8}, {7, RelationKind::BelongsTo, 8}, {9, RelationKind::BelongsTo, 8},
    };
    std::bernoulli_distribution coin(0.5);
    for (EntityId u = 0; u < 3; ++u) {
        if (coin(rng)) triples.push_back({u, RelationKind::InterestedIn, 9});
        if (coin(rng)) triples.push_back({u, RelationKind::LikesCategory, 8});
        for (EntityId a = 3; a < 6; ++a) {
            if (coin(rng)) triples.push_back({u, RelationKind::Clicks, a});
        }
    }
    p.graph = kg::KnowledgeGraph::build_indexed(std::move(entities), std::move(triples));

    constexpr std::uint32_t vocab = 16;
    std::uniform_int_distribution<std::uint32_t> tok(0, vocab - 1);
    std::uniform_int_distribution<int> len(1, 5);
    for (std::size_t e = 0; e < p.graph.entity_count(); ++e) {
        text::TokenSeq s;
        const int n = len(rng);
        for (int t = 0; t < n; ++t) s.ids.push_back(tok(rng));
        p.tokens.push_back(std::move(s));
    }

    model::ModelDims dims{4, 4, 4, vocab, 3};
    p.model = model::Model::init(dims, p.graph.entity_count(), rng);
    // Move entity rows off the unit sphere and give the bias some spread.
    std::uniform_real_distribution<double> shrink(0.3, 0.9);
    for (Eigen::Index r = 0; r < p.model.kg.entity.rows(); ++r) p.model.kg.entity.row(r) *= shrink(rng);
    std::normal_distribution<double> noise(0.0, 0.3);
    for (Eigen::Index i = 0; i < p.model.fusion.b.size(); ++i) p.model.fusion.b.data()[i] = noise(rng);

    std::uniform_int_distribution<int> count(8, 16);
    std::uniform_int_distribution<EntityId> user(0, 2);
    std::uniform_int_distribution<EntityId> ad(3, 5);
    const int n = count(rng);
    for (int i = 0; i < n; ++i) p.batch.clicks.push_back({user(rng), ad(rng), coin(rng) ? 1 : 0});
    for (const auto& t : p.graph.triples()) {
        try {
            p.batch.kg_pairs.push_back({t, kg::sample_negative(p.graph, t, rng)});
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NoNegativeAvailable) throw;
        }
    }
    for (EntityId e = 0; e < p.graph.entity_count(); ++e) p.batch.align_entities.push_back(e);
    p.weights = {1.0, 0.5, 0.1};
    return p;
}

GradCheckReport check_tiny_problem(std::uint64_t seed, const GradCheckOptions& options) {
    TinyProblem p = make_tiny_problem(seed);
    const auto ctx = p.context();
    model::Model analytic = compute_gradients(p.model, ctx, p.batch);
    return finite_difference_check(
        p.model, analytic, [&](const model::Model& m) { return reference_objective(m, ctx, p.batch); }, options);
}

}  // namespace kgsr::train
