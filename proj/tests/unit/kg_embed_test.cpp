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


#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

#include "kgsr/embed/transe.hpp"
#include "kgsr/error.hpp"
#include "kgsr/io/snapshot.hpp"

namespace kgsr::embed {
namespace {

using kg::EntityKind;
using kg::RelationKind;

KgEmbeddings two_d(std::vector<std::vector<double>> ents, std::vector<double> rel) {
    KgEmbeddings e;
    e.entity.resize(static_cast<Eigen::Index>(ents.size()), 2);
    for (std::size_t i = 0; i < ents.size(); ++i) e.entity.row(static_cast<Eigen::Index>(i)) << ents[i][0], ents[i][1];
    e.relation = Matrix::Zero(kg::kRelationKindCount, 2);
    e.relation.row(0) << rel[0], rel[1];
    return e;
}

TEST(ScoreTriple, HandCases) {
    const kg::Triple t{0, RelationKind::Clicks, 1};
    EXPECT_EQ(score_triple(two_d({{0.3, 0.4}, {0.3, 0.4}}, {0, 0}), t), 0.0);
    EXPECT_EQ(score_triple(two_d({{1, 0}, {1, 1}}, {0, 1}), t), 0.0);
    EXPECT_NEAR(score_triple(two_d({{1, 0}, {0, 1}}, {0, 0}), t), 1.41421, 1e-5);
}

TEST(ScoreTriple, UnknownRows) {
    auto e = two_d({{1, 0}}, {0, 0});
    try {
        score_triple(e, {0, RelationKind::Clicks, 4});
        FAIL();
    } catch (const Error& err) {
        EXPECT_EQ(err.code(), ErrorCode::UnknownEntity);
    }
}

TEST(ScoreTriple, TranslationCovariant) {
    Rng rng(1);
    auto e = KgEmbeddings::init(6, kg::kRelationKindCount, 5, rng);
    const kg::Triple t{1, RelationKind::Promotes, 4};
    const double before = score_triple(e, t);
    Vector c = Vector::Random(5);
    e.entity.row(1) += c.transpose();
    e.entity.row(4) += c.transpose();
    EXPECT_NEAR(score_triple(e, t), before, 1e-12);
}

TEST(MarginLoss, HandCases) {
    EXPECT_EQ(margin_loss(0.0, 2.0, 1.0), 0.0);
    EXPECT_EQ(margin_loss(0.7, 0.7, 1.0), 1.0);
    EXPECT_NEAR(margin_loss(1.2, 0.3, 0.5), 1.4, 1e-12);
}

TEST(SgdStep, HandArithmeticAndIdentity) {
    KgEmbeddings e;
    e.entity.resize(1, 2);
    e.entity << 0.5, 0.0;
    e.relation = Matrix::Zero(1, 2);
    KgGradients g = KgGradients::zeros_like(e);
    g.entity << 1.0, 0.0;
    auto stepped = sgd_step(e, g, 0.1);
    EXPECT_NEAR(stepped.entity(0, 0), 0.4, 1e-15);
    EXPECT_EQ(stepped.entity(0, 1), 0.0);

    Rng rng(2);
    auto r = KgEmbeddings::init(10, 5, 4, rng);
    auto same = sgd_step(r, KgGradients::zeros_like(r), 0.5);
    EXPECT_TRUE(same.entity.isApprox(r.entity, 1e-14));
    KgGradients big{Matrix::Ones(10, 4), Matrix::Ones(5, 4)};
    auto same_lr = sgd_step(r, big, 0.0);
    EXPECT_TRUE(same_lr.entity.isApprox(r.entity, 1e-14));
    EXPECT_EQ(same_lr.relation, r.relation);

    KgGradients bad{Matrix::Zero(3, 4), Matrix::Zero(5, 4)};
    try {
        sgd_step(r, bad, 0.1);
        FAIL();
    } catch (const Error& err) {
        EXPECT_EQ(err.code(), ErrorCode::ShapeMismatch);
    }
}

TEST(SgdStep, RenormalizesToUnitBall) {
    KgEmbeddings e;
    e.entity.resize(2, 2);
    e.entity << 3.0, 4.0, 0.1, 0.1;
    e.relation = Matrix::Zero(1, 2);
    auto s = sgd_step(e, KgGradients::zeros_like(e), 0.0);
    EXPECT_NEAR(s.entity.row(0).norm(), 1.0, 1e-12);
    EXPECT_NEAR(s.entity(0, 0), 0.6, 1e-12);
    EXPECT_EQ(s.entity.row(1), e.entity.row(1));
}

// 20 entities, users/ads/tags with random typed triples.
kg::KnowledgeGraph small_graph(std::uint64_t seed) {
    std::vector<kg::Entity> es;
    for (int i = 0; i < 7; ++i) es.push_back({"u" + std::to_string(i), EntityKind::User, ""});
    for (int i = 0; i < 7; ++i) es.push_back({"a" + std::to_string(i), EntityKind::Ad, ""});
    for (int i = 0; i < 6; ++i) es.push_back({"t" + std::to_string(i), EntityKind::InterestTag, ""});
    Rng rng(seed);
    std::uniform_int_distribution<int> p7(0, 6), p6(0, 5), coin(0, 1);
    std::vector<kg::TripleSpec> ts;
    for (int i = 0; i < 25; ++i) {
        if (coin(rng)) {
            ts.push_back({"u" + std::to_string(p7(rng)), RelationKind::Clicks, "a" + std::to_string(p7(rng))});
        } else {
            ts.push_back({"u" + std::to_string(p7(rng)), RelationKind::InterestedIn, "t" + std::to_string(p6(rng))});
        }
    }
    return kg::KnowledgeGraph::build(es, ts);
}

double total_hinge(const KgEmbeddings& e, const std::vector<NegativePair>& pairs, double gamma) {
    double s = 0.0;
    for (const auto& p : pairs) s += margin_loss(score_triple(e, p.positive), score_triple(e, p.negative), gamma);
    return s;
}

TEST(KgLoss, GradientMatchesFiniteDifferences) {
    const double eps = 1e-5;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto g = small_graph(seed);
        Rng rng(seed + 100);
        auto emb = KgEmbeddings::init(g.entity_count(), kg::kRelationKindCount, 4, rng);
        MarginConfig cfg;
        cfg.gamma = 1.0;
        auto res = kg_loss_epoch(emb, g, cfg, rng);
        EXPECT_NEAR(res.loss, total_hinge(emb, res.pairs, cfg.gamma), 1e-12);
        double worst = 0.0;
        for (Matrix* block : {&emb.entity, &emb.relation}) {
            const Matrix& an = block == &emb.entity ? res.gradients.entity : res.gradients.relation;
            for (Eigen::Index i = 0; i < block->size(); ++i) {
                const double saved = block->data()[i];
                block->data()[i] = saved + eps;
                const double fp = total_hinge(emb, res.pairs, cfg.gamma);
                block->data()[i] = saved - eps;
                const double fm = total_hinge(emb, res.pairs, cfg.gamma);
                block->data()[i] = saved;
                const double num = (fp - fm) / (2 * eps);
                const double a = an.data()[i];
                if (std::abs(a) < 1e-8 && std::abs(num) < 1e-8) continue;
                worst = std::max(worst, std::abs(a - num) / std::max(std::abs(a), std::abs(num)));
            }
        }
        EXPECT_LT(worst, 1e-4) << "seed " << seed;
    }
}

TEST(KgLoss, InactiveHingeGivesZeroLossAndGradient) {
    auto g = kg::KnowledgeGraph::build(
        {{"u0", EntityKind::User, ""}, {"u1", EntityKind::User, ""}, {"a0", EntityKind::Ad, ""}},
        {{"u0", RelationKind::Clicks, "a0"}});
    KgEmbeddings e;
    e.entity.resize(3, 2);
    e.entity << 0.0, 0.0, 1.0, 1.0, 0.0, 0.0;  // positive distance 0, negative distance sqrt 2
    e.relation = Matrix::Zero(kg::kRelationKindCount, 2);
    Rng rng(1);
    MarginConfig cfg;
    cfg.gamma = 0.5;
    auto res = kg_loss_epoch(e, g, cfg, rng);
    EXPECT_EQ(res.loss, 0.0);
    EXPECT_TRUE(res.gradients.entity.isZero(0.0));
    EXPECT_TRUE(res.gradients.relation.isZero(0.0));
}

TEST(KgLoss, SingleActiveTripleHeadGradientAndDescent) {
    auto g = kg::KnowledgeGraph::build(
        {{"u0", EntityKind::User, ""}, {"u1", EntityKind::User, ""}, {"a0", EntityKind::Ad, ""}},
        {{"u0", RelationKind::Clicks, "a0"}});
    KgEmbeddings e;
    e.entity.resize(3, 2);
    e.entity << 0.6, 0.0, 0.1, 0.1, 0.0, 0.5;
    e.relation = Matrix::Zero(kg::kRelationKindCount, 2);
    Rng rng(1);
    MarginConfig cfg;
    auto res = kg_loss_epoch(e, g, cfg, rng);
    ASSERT_GT(res.loss, 0.0);
    // The only corruption replaces u0 by u1, so u0 appears only in the positive.
    const RowVector resid = e.entity.row(0) - e.entity.row(2);
    const RowVector expect = resid / resid.norm();
    EXPECT_NEAR((res.gradients.entity.row(0) - expect).norm(), 0.0, 1e-12);
    auto stepped = sgd_step(e, res.gradients, 1e-3);
    EXPECT_LT(total_hinge(stepped, res.pairs, cfg.gamma), res.loss);
}

TEST(KgLoss, NonNegativeAndRowsStayInBall) {
    auto g = small_graph(3);
    Rng rng(5);
    auto emb = KgEmbeddings::init(g.entity_count(), kg::kRelationKindCount, 8, rng);
    MarginConfig cfg;
    for (int epoch = 0; epoch < 20; ++epoch) {
        auto res = kg_loss_epoch(emb, g, cfg, rng);
        EXPECT_GE(res.loss, 0.0);
        emb = sgd_step(emb, res.gradients, 0.05);
        for (Eigen::Index r = 0; r < emb.entity.rows(); ++r) EXPECT_LE(emb.entity.row(r).norm(), 1.0 + 1e-6);
        EXPECT_TRUE(emb.entity.allFinite());
    }
}

TEST(KgEmbeddings, InitIsSeededAndBounded) {
    Rng a(4), b(4);
    auto x = KgEmbeddings::init(30, 5, 16, a);
    auto y = KgEmbeddings::init(30, 5, 16, b);
    EXPECT_EQ(x.entity, y.entity);
    EXPECT_EQ(x.relation, y.relation);
    EXPECT_LE(x.entity.cwiseAbs().maxCoeff(), 6.0 / std::sqrt(16.0));
}

TEST(EmbeddingSnapshot, RoundTripThroughFloat32) {
    Rng rng(6);
    auto emb = KgEmbeddings::init(12, 5, 7, rng);
    auto bytes = io::encode_matrix(emb.entity);
    ASSERT_GE(bytes.size(), 4u);
    EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "KGSR");
    EXPECT_EQ(bytes.size(), 16u + 12u * 7u * 4u);
    Matrix back = io::decode_matrix(bytes);
    EXPECT_EQ(back, emb.entity.cast<float>().cast<double>());
}

}  // namespace
}  // namespace kgsr::embed
