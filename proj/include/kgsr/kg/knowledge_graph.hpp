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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "kgsr/types.hpp"

namespace kgsr::kg {

enum class EntityKind : std::uint8_t { User, Ad, Product, Category, InterestTag };
inline constexpr std::size_t kEntityKindCount = 5;

enum class RelationKind : std::uint8_t { Clicks, Promotes, LikesCategory, BelongsTo, InterestedIn };
inline constexpr std::size_t kRelationKindCount = 5;

enum class Direction : std::uint8_t { Outgoing, Incoming };

std::string_view to_string(EntityKind kind);
std::string_view to_string(RelationKind kind);
std::optional<EntityKind> parse_entity_kind(std::string_view s);
std::optional<RelationKind> parse_relation_kind(std::string_view s);

struct Entity {
    std::string id;
    EntityKind kind;
    std::string label;
};

/// Triple over dense entity indices.
struct Triple {
    EntityId head;
    RelationKind relation;
    EntityId tail;

    friend auto operator<=>(const Triple&, const Triple&) = default;
};

/// Triple as it appears in files, over external string ids.
struct TripleSpec {
    std::string head;
    RelationKind relation;
    std::string tail;
};

struct Neighbor {
    RelationKind relation;
    EntityId entity;
    Direction direction;

    friend auto operator<=>(const Neighbor&, const Neighbor&) = default;
};

struct Path {
    std::vector<EntityId> entities;       // depth + 1 entries
    std::vector<RelationKind> relations;  // depth entries
    std::vector<Direction> directions;    // direction of each hop relative to the walk

    friend bool operator==(const Path&, const Path&) = default;
    friend auto operator<=>(const Path&, const Path&) = default;
};

struct InteractionRecord {
    EntityId user;
    EntityId ad;
    int label;
    std::int64_t timestamp;
};

/// Immutable multi-relational graph. Entities keep the order they were
/// given in; triples are deduplicated and sorted; the adjacency lists hold
/// each triple twice (once per endpoint) with a direction flag.
class KnowledgeGraph {
public:
    KnowledgeGraph() = default;

    static KnowledgeGraph build(std::vector<Entity> entities, const std::vector<TripleSpec>& triples);
    static KnowledgeGraph build_indexed(std::vector<Entity> entities, std::vector<Triple> triples);

    std::size_t entity_count() const { return entities_.size(); }
    std::size_t triple_count() const { return triples_.size(); }

    const Entity& entity(EntityId id) const;
    std::span<const Entity> entities() const { return entities_; }
    std::span<const Triple> triples() const { return triples_; }

    std::optional<EntityId> find(std::string_view id) const;
    /// Throws UnknownEntity.
    EntityId require(std::string_view id) const;

    bool contains(const Triple& t) const { return triple_keys_.count(key(t)) != 0; }

    /// Sorted by (relation, neighbor, direction). Throws UnknownEntity.
    std::span<const Neighbor> neighbors(EntityId id) const;
    /// Distinct neighbor ids in ascending order, ignoring relation and direction.
    std::span<const EntityId> neighbor_ids(EntityId id) const;

    std::span<const EntityId> entities_of_kind(EntityKind kind) const {
        return by_kind_[static_cast<std::size_t>(kind)];
    }

private:
    static std::uint64_t key(const Triple& t) {
        return (static_cast<std::uint64_t>(t.head) << 32) | (static_cast<std::uint64_t>(t.tail) << 3) |
               static_cast<std::uint64_t>(t.relation);
    }

    void check_id(EntityId id) const;

    std::vector<Entity> entities_;
    std::unordered_map<std::string, EntityId> index_;
    std::vector<Triple> triples_;
    std::unordered_set<std::uint64_t> triple_keys_;
    std::vector<std::size_t> adj_offsets_;
    std::vector<Neighbor> adjacency_;
    std::vector<std::size_t> nbr_offsets_;
    std::vector<EntityId> neighbor_ids_;
    std::array<std::vector<EntityId>, kEntityKindCount> by_kind_;
};

/// All simple paths with exactly `depth` hops from `start`, walking edges in
/// either direction. Sorted lexicographically. depth must be in [1, 4].
std::vector<Path> multi_hop_paths(const KnowledgeGraph& graph, EntityId start, int depth);

/// Corrupts one endpoint of `positive` (fair coin for the side) with a
/// uniformly drawn entity of the same kind, rejecting true triples and
/// self-loops. Throws NoNegativeAvailable if no corruption is possible.
Triple sample_negative(const KnowledgeGraph& graph, const Triple& positive, Rng& rng);

}  // namespace kgsr::kg
