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

#include <algorithm>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "kgsr/error.hpp"
#include "kgsr/kg/knowledge_graph.hpp"

namespace kgsr::kg {
namespace {

using RK = RelationKind;

Entity ent(std::string id, EntityKind kind) { return {id, kind, id}; }

template <class F>
ErrorCode code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no kgsr::Error thrown";
    return ErrorCode::IoError;
}

// Users, ads, tags and categories with random typed triples between them.
struct RandomGraph {
    std::vector<Entity> entities;
    std::vector<TripleSpec> triples;
};

RandomGraph random_graph(std::size_t per_kind, std::size_t triples, std::uint64_t seed) {
    RandomGraph g;
    const std::vector<std::pair<char, EntityKind>> kinds = {
        {'u', EntityKind::User}, {'a', EntityKind::Ad}, {'t', EntityKind::InterestTag}, {'c', EntityKind::Category}};
    for (const auto& [p, k] : kinds) {
        for (std::size_t i = 0; i < per_kind; ++i) g.entities.push_back(ent(p + std::to_string(i), k));
    }
    Rng rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, per_kind - 1);
    const std::vector<std::tuple<char, RK, char>> shapes = {
        {'u', RK::Clicks, 'a'}, {'u', RK::InterestedIn, 't'}, {'u', RK::LikesCategory, 'c'}, {'t', RK::BelongsTo, 'c'}};
    std::uniform_int_distribution<std::size_t> shape(0, shapes.size() - 1);
    for (std::size_t i = 0; i < triples; ++i) {
        const auto& [h, r, t] = shapes[shape(rng)];
        g.triples.push_back({h + std::to_string(pick(rng)), r, t + std::to_string(pick(rng))});
    }
    return g;
}

TEST(KnowledgeGraph, EmptyGraph) {
    auto g = KnowledgeGraph::build({}, {});
    EXPECT_EQ(g.entity_count(), 0u);
    EXPECT_EQ(g.triple_count(), 0u);
}

TEST(KnowledgeGraph, SingleEdgeAppearsAtBothEnds) {
    auto g = KnowledgeGraph::build({ent("u1", EntityKind::User), ent("a1", EntityKind::Ad)},
                                   {{"u1", RK::Clicks, "a1"}});
    ASSERT_EQ(g.neighbors(g.require("u1")).size(), 1u);
    ASSERT_EQ(g.neighbors(g.require("a1")).size(), 1u);
    EXPECT_EQ(g.neighbors(g.require("u1"))[0].direction, Direction::Outgoing);
    EXPECT_EQ(g.neighbors(g.require("a1"))[0].direction, Direction::Incoming);
}

TEST(KnowledgeGraph, DuplicatesCollapseToSetSize) {
    auto rg = random_graph(40, 963, 7);
    Rng rng(8);
    std::uniform_int_distribution<std::size_t> pick(0, 962);
    for (int i = 0; i < 37; ++i) rg.triples.push_back(rg.triples[pick(rng)]);
    std::set<std::tuple<std::string, RK, std::string>> oracle;
    for (const auto& t : rg.triples) oracle.insert({t.head, t.relation, t.tail});
    auto g = KnowledgeGraph::build(rg.entities, rg.triples);
    EXPECT_EQ(g.triple_count(), oracle.size());
}

TEST(KnowledgeGraph, ThousandTriplesWith37Duplicates) {
    // Distinct triples by construction: every user clicks a distinct ad.
    std::vector<Entity> es;
    std::vector<TripleSpec> ts;
    for (int i = 0; i < 963; ++i) {
        es.push_back(ent("u" + std::to_string(i), EntityKind::User));
        es.push_back(ent("a" + std::to_string(i), EntityKind::Ad));
        ts.push_back({"u" + std::to_string(i), RK::Clicks, "a" + std::to_string(i)});
    }
    for (int i = 0; i < 37; ++i) ts.push_back(ts[static_cast<std::size_t>(i * 11)]);
    ASSERT_EQ(ts.size(), 1000u);
    EXPECT_EQ(KnowledgeGraph::build(es, ts).triple_count(), 963u);
}

TEST(KnowledgeGraph, Errors) {
    EXPECT_EQ(code_of([] { KnowledgeGraph::build({ent("u1", EntityKind::User)}, {{"u1", RK::Clicks, "a9"}}); }),
              ErrorCode::DanglingEntity);
    EXPECT_EQ(code_of([] { KnowledgeGraph::build({ent("u1", EntityKind::User)}, {{"u1", RK::Clicks, "u1"}}); }),
              ErrorCode::SelfLoop);
    auto g = KnowledgeGraph::build({ent("u1", EntityKind::User)}, {});
    EXPECT_EQ(code_of([&] { g.neighbors(5); }), ErrorCode::UnknownEntity);
    EXPECT_EQ(code_of([&] { g.require("nobody"); }), ErrorCode::UnknownEntity);
}

TEST(KnowledgeGraph, NeighborsOfIsolatedAndSmallCases) {
    auto g = KnowledgeGraph::build({ent("u1", EntityKind::User), ent("a1", EntityKind::Ad),
                                    ent("t1", EntityKind::InterestTag), ent("x", EntityKind::Product)},
                                   {{"u1", RK::Clicks, "a1"}, {"u1", RK::InterestedIn, "t1"}});
    EXPECT_TRUE(g.neighbors(g.require("x")).empty());
    EXPECT_EQ(g.neighbors(g.require("u1")).size(), 2u);
}

TEST(KnowledgeGraph, HandshakeIdentity) {
    auto rg = random_graph(30, 500, 11);
    auto g = KnowledgeGraph::build(rg.entities, rg.triples);
    std::size_t total = 0;
    for (EntityId v = 0; v < g.entity_count(); ++v) total += g.neighbors(v).size();
    EXPECT_EQ(total, 2 * g.triple_count());
}

TEST(KnowledgeGraph, AdjacencyIsDerivableFromTriples) {
    auto rg = random_graph(20, 300, 12);
    auto g = KnowledgeGraph::build(rg.entities, rg.triples);
    std::vector<std::vector<Neighbor>> rebuilt(g.entity_count());
    for (const auto& t : g.triples()) {
        rebuilt[t.head].push_back({t.relation, t.tail, Direction::Outgoing});
        rebuilt[t.tail].push_back({t.relation, t.head, Direction::Incoming});
    }
    for (EntityId v = 0; v < g.entity_count(); ++v) {
        std::sort(rebuilt[v].begin(), rebuilt[v].end());
        auto got = g.neighbors(v);
        ASSERT_TRUE(std::equal(got.begin(), got.end(), rebuilt[v].begin(), rebuilt[v].end())) << "entity " << v;
        // Repeated calls return the same view.
        auto again = g.neighbors(v);
        EXPECT_TRUE(std::equal(got.begin(), got.end(), again.begin(), again.end()));
    }
}

TEST(MultiHop, UniqueChain) {
    auto g = KnowledgeGraph::build({ent("u", EntityKind::User), ent("t", EntityKind::InterestTag),
                                    ent("c", EntityKind::Category), ent("a", EntityKind::Ad)},
                                   {{"u", RK::InterestedIn, "t"}, {"t", RK::BelongsTo, "c"}, {"a", RK::BelongsTo, "c"}});
    auto paths = multi_hop_paths(g, g.require("u"), 3);
    ASSERT_EQ(paths.size(), 1u);
    EXPECT_EQ(paths[0].entities.back(), g.require("a"));
    EXPECT_EQ(paths[0].directions.back(), Direction::Incoming);
}

TEST(MultiHop, IsolatedAndBadDepth) {
    auto g = KnowledgeGraph::build({ent("u", EntityKind::User)}, {});
    for (int d = 1; d <= 4; ++d) EXPECT_TRUE(multi_hop_paths(g, 0, d).empty());
    EXPECT_EQ(code_of([&] { multi_hop_paths(g, 0, 0); }), ErrorCode::InvalidConfig);
    EXPECT_EQ(code_of([&] { multi_hop_paths(g, 3, 1); }), ErrorCode::UnknownEntity);
}

// Brute force: extend every partial walk by every incident triple, keeping
// walks whose entities are distinct.
std::vector<Path> dfs_oracle(const KnowledgeGraph& g, EntityId start, int depth) {
    std::vector<Path> out;
    std::function<void(Path&)> rec = [&](Path& p) {
        if (static_cast<int>(p.relations.size()) == depth) {
            out.push_back(p);
            return;
        }
        const EntityId at = p.entities.back();
        for (const auto& t : g.triples()) {
            for (int side = 0; side < 2; ++side) {
                const EntityId from = side == 0 ? t.head : t.tail;
                const EntityId to = side == 0 ? t.tail : t.head;
                if (from != at) continue;
                if (std::find(p.entities.begin(), p.entities.end(), to) != p.entities.end()) continue;
                p.entities.push_back(to);
                p.relations.push_back(t.relation);
                p.directions.push_back(side == 0 ? Direction::Outgoing : Direction::Incoming);
                rec(p);
                p.entities.pop_back();
                p.relations.pop_back();
                p.directions.pop_back();
            }
        }
    };
    Path p;
    p.entities.push_back(start);
    rec(p);
    std::sort(out.begin(), out.end());
    return out;
}

TEST(MultiHop, MatchesExhaustiveSearch) {
    auto rg = random_graph(6, 40, 13);
    auto g = KnowledgeGraph::build(rg.entities, rg.triples);
    for (EntityId v = 0; v < g.entity_count(); ++v) {
        for (int depth = 1; depth <= 3; ++depth) {
            EXPECT_EQ(multi_hop_paths(g, v, depth), dfs_oracle(g, v, depth)) << "start " << v << " depth " << depth;
        }
    }
}

TEST(MultiHop, DepthOneMatchesNeighbors) {
    auto rg = random_graph(10, 80, 14);
    auto g = KnowledgeGraph::build(rg.entities, rg.triples);
    for (EntityId v = 0; v < g.entity_count(); ++v) {
        std::multiset<EntityId> ends;
        for (const auto& p : multi_hop_paths(g, v, 1)) ends.insert(p.entities.back());
        std::multiset<EntityId> nbrs;
        for (const auto& n : g.neighbors(v)) nbrs.insert(n.entity);
        EXPECT_EQ(ends, nbrs);
    }
}

TEST(SampleNegative, OnlyLegalCorruption) {
    auto g = KnowledgeGraph::build(
        {ent("u1", EntityKind::User), ent("u2", EntityKind::User), ent("a1", EntityKind::Ad)},
        {{"u1", RK::Clicks, "a1"}});
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        auto neg = sample_negative(g, g.triples()[0], rng);
        EXPECT_EQ(neg.head, g.require("u2"));
        EXPECT_EQ(neg.tail, g.require("a1"));
    }
}

TEST(SampleNegative, NoCorruptionAvailable) {
    auto g = KnowledgeGraph::build({ent("u1", EntityKind::User), ent("a1", EntityKind::Ad)},
                                   {{"u1", RK::Clicks, "a1"}});
    Rng rng(3);
    EXPECT_EQ(code_of([&] { sample_negative(g, g.triples()[0], rng); }), ErrorCode::NoNegativeAvailable);
}

TEST(SampleNegative, DeterministicPerSeed) {
    auto rg = random_graph(12, 100, 15);
    auto g = KnowledgeGraph::build(rg.entities, rg.triples);
    Rng a(99), b(99);
    for (const auto& t : g.triples()) EXPECT_EQ(sample_negative(g, t, a), sample_negative(g, t, b));
}

TEST(SampleNegative, TypedNeverPositiveAndFairCoin) {
    auto rg = random_graph(12, 120, 16);  // 48 entities
    auto g = KnowledgeGraph::build(rg.entities, rg.triples);
    Rng rng(17);
    int heads = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const auto& t = g.triples()[static_cast<std::size_t>(i) % g.triple_count()];
        auto neg = sample_negative(g, t, rng);
        ASSERT_FALSE(g.contains(neg));
        ASSERT_EQ(neg.relation, t.relation);
        const bool head_changed = neg.head != t.head;
        ASSERT_NE(head_changed, neg.tail != t.tail) << "exactly one side changes";
        if (head_changed) {
            ++heads;
            EXPECT_EQ(g.entity(neg.head).kind, g.entity(t.head).kind);
        } else {
            EXPECT_EQ(g.entity(neg.tail).kind, g.entity(t.tail).kind);
        }
    }
    EXPECT_NEAR(static_cast<double>(heads) / n, 0.5, 0.02);
}

}  // namespace
}  // namespace kgsr::kg
