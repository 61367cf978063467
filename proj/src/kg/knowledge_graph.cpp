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

#include "kgsr/kg/knowledge_graph.hpp"

#include <algorithm>

#include "kgsr/error.hpp"

namespace kgsr::kg {

namespace {

constexpr std::array<std::string_view, kEntityKindCount> kEntityNames = {"User", "Ad", "Product", "Category",
                                                                         "InterestTag"};
constexpr std::array<std::string_view, kRelationKindCount> kRelationNames = {
    "Clicks", "Promotes", "LikesCategory", "BelongsTo", "InterestedIn"};

constexpr int kNegativeAttempts = 100;

}  // namespace

std::string_view to_string(EntityKind kind) { return kEntityNames[static_cast<std::size_t>(kind)]; }

std::string_view to_string(RelationKind kind) { return kRelationNames[static_cast<std::size_t>(kind)]; }

std::optional<EntityKind> parse_entity_kind(std::string_view s) {
    for (std::size_t i = 0; i < kEntityNames.size(); ++i) {
        if (kEntityNames[i] == s) return static_cast<EntityKind>(i);
    }
    return std::nullopt;
}

std::optional<RelationKind> parse_relation_kind(std::string_view s) {
    for (std::size_t i = 0; i < kRelationNames.size(); ++i) {
        if (kRelationNames[i] == s) return static_cast<RelationKind>(i);
    }
    return std::nullopt;
}

KnowledgeGraph KnowledgeGraph::build(std::vector<Entity> entities, const std::vector<TripleSpec>& triples) {
    std::unordered_map<std::string, EntityId> index;
    index.reserve(entities.size());
    for (std::size_t i = 0; i < entities.size(); ++i) {
        if (!index.emplace(entities[i].id, static_cast<EntityId>(i)).second) {
            throw Error(ErrorCode::InvalidConfig, "duplicate entity id `" + entities[i].id + "`");
        }
    }
    std::vector<Triple> resolved;
    resolved.reserve(triples.size());
    for (const auto& t : triples) {
        auto h = index.find(t.head);
        if (h == index.end()) throw Error(ErrorCode::DanglingEntity, "triple head `" + t.head + "` is not an entity");
        auto tl = index.find(t.tail);
        if (tl == index.end()) throw Error(ErrorCode::DanglingEntity, "triple tail `" + t.tail + "` is not an entity");
        resolved.push_back({h->second, t.relation, tl->second});
    }
    return build_indexed(std::move(entities), std::move(resolved));
}

KnowledgeGraph KnowledgeGraph::build_indexed(std::vector<Entity> entities, std::vector<Triple> triples) {
    KnowledgeGraph g;
    g.entities_ = std::move(entities);
    const auto n = g.entities_.size();
    if (n >= (1u << 29)) throw Error(ErrorCode::InvalidConfig, "too many entities");
    g.index_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!g.index_.emplace(g.entities_[i].id, static_cast<EntityId>(i)).second) {
            throw Error(ErrorCode::InvalidConfig, "duplicate entity id `" + g.entities_[i].id + "`");
        }
        g.by_kind_[static_cast<std::size_t>(g.entities_[i].kind)].push_back(static_cast<EntityId>(i));
    }
    for (const auto& t : triples) {
        if (t.head >= n || t.tail >= n) {
            throw Error(ErrorCode::DanglingEntity, "triple references entity index outside the table");
        }
        if (t.head == t.tail) {
            throw Error(ErrorCode::SelfLoop, "self-loop on `" + g.entities_[t.head].id + "`");
        }
    }
    std::sort(triples.begin(), triples.end());
    triples.erase(std::unique(triples.begin(), triples.end()), triples.end());
    g.triples_ = std::move(triples);
    g.triple_keys_.reserve(g.triples_.size());
    for (const auto& t : g.triples_) g.triple_keys_.insert(key(t));

    // CSR adjacency.
    std::vector<std::size_t> degree(n, 0);
    for (const auto& t : g.triples_) {
        ++degree[t.head];
        ++degree[t.tail];
    }
    g.adj_offsets_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) g.adj_offsets_[i + 1] = g.adj_offsets_[i] + degree[i];
    g.adjacency_.resize(g.adj_offsets_[n]);
    std::vector<std::size_t> fill(g.adj_offsets_.begin(), g.adj_offsets_.end() - 1);
    for (const auto& t : g.triples_) {
        g.adjacency_[fill[t.head]++] = {t.relation, t.tail, Direction::Outgoing};
        g.adjacency_[fill[t.tail]++] = {t.relation, t.head, Direction::Incoming};
    }
    g.nbr_offsets_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        auto first = g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.adj_offsets_[i]);
        auto last = g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.adj_offsets_[i + 1]);
        std::sort(first, last);
        std::vector<EntityId> ids;
        ids.reserve(static_cast<std::size_t>(last - first));
        for (auto it = first; it != last; ++it) ids.push_back(it->entity);
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        g.neighbor_ids_.insert(g.neighbor_ids_.end(), ids.begin(), ids.end());
        g.nbr_offsets_[i + 1] = g.neighbor_ids_.size();
    }
    return g;
}

void KnowledgeGraph::check_id(EntityId id) const {
    if (id >= entities_.size()) throw Error(ErrorCode::UnknownEntity, "entity index " + std::to_string(id));
}

const Entity& KnowledgeGraph::entity(EntityId id) const {
    check_id(id);
    return entities_[id];
}

std::optional<EntityId> KnowledgeGraph::find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

EntityId KnowledgeGraph::require(std::string_view id) const {
    auto found = find(id);
    if (!found) throw Error(ErrorCode::UnknownEntity, "`" + std::string(id) + "`");
    return *found;
}

std::span<const Neighbor> KnowledgeGraph::neighbors(EntityId id) const {
    check_id(id);
    return std::span<const Neighbor>(adjacency_).subspan(adj_offsets_[id], adj_offsets_[id + 1] - adj_offsets_[id]);
}

std::span<const EntityId> KnowledgeGraph::neighbor_ids(EntityId id) const {
    check_id(id);
    return std::span<const EntityId>(neighbor_ids_).subspan(nbr_offsets_[id], nbr_offsets_[id + 1] - nbr_offsets_[id]);
}

namespace {

void extend_paths(const KnowledgeGraph& graph, Path& current, int remaining, std::vector<Path>& out) {
    if (remaining == 0) {
        out.push_back(current);
        return;
    }
    const EntityId last = current.entities.back();
    for (const auto& nb : graph.neighbors(last)) {
        if (std::find(current.entities.begin(), current.entities.end(), nb.entity) != current.entities.end()) {
            continue;
        }
        current.entities.push_back(nb.entity);
        current.relations.push_back(nb.relation);
        current.directions.push_back(nb.direction);
        extend_paths(graph, current, remaining - 1, out);
        current.entities.pop_back();
        current.relations.pop_back();
        current.directions.pop_back();
    }
}

}  // namespace

std::vector<Path> multi_hop_paths(const KnowledgeGraph& graph, EntityId start, int depth) {
    if (depth < 1 || depth > 4) {
        throw Error(ErrorCode::InvalidConfig, "multi-hop depth must be in [1, 4], got " + std::to_string(depth));
    }
    graph.entity(start);
    std::vector<Path> out;
    Path current;
    current.entities.push_back(start);
    extend_paths(graph, current, depth, out);
    std::sort(out.begin(), out.end());
    return out;
}

Triple sample_negative(const KnowledgeGraph& graph, const Triple& positive, Rng& rng) {
    const auto& head_pool = graph.entities_of_kind(graph.entity(positive.head).kind);
    const auto& tail_pool = graph.entities_of_kind(graph.entity(positive.tail).kind);
    std::bernoulli_distribution coin(0.5);

    auto valid = [&](const Triple& t) { return t.head != t.tail && !graph.contains(t); };

    for (int attempt = 0; attempt < kNegativeAttempts; ++attempt) {
        Triple cand = positive;
        if (coin(rng)) {
            std::uniform_int_distribution<std::size_t> pick(0, head_pool.size() - 1);
            cand.head = head_pool[pick(rng)];
        } else {
            std::uniform_int_distribution<std::size_t> pick(0, tail_pool.size() - 1);
            cand.tail = tail_pool[pick(rng)];
        }
        if (valid(cand)) return cand;
    }

    // Rejection ran out; enumerate so the error is only raised when no
    // corruption exists at all.
    std::vector<Triple> candidates;
    for (EntityId h : head_pool) {
        Triple c{h, positive.relation, positive.tail};
        if (valid(c)) candidates.push_back(c);
    }
    for (EntityId t : tail_pool) {
        Triple c{positive.head, positive.relation, t};
        if (valid(c)) candidates.push_back(c);
    }
    if (candidates.empty()) {
        throw Error(ErrorCode::NoNegativeAvailable, "every corruption of (" + graph.entity(positive.head).id + ", " +
                                                        std::string(to_string(positive.relation)) + ", " +
                                                        graph.entity(positive.tail).id + ") is a true triple");
    }
    std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
    return candidates[pick(rng)];
}

}  // namespace kgsr::kg
