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

#include "kgsr/index/vector_store.hpp"

namespace kgsr::index {

struct HnswParams {
    int m = 16;
    int ef_construction = 200;
    std::uint64_t seed = 42;
};

struct AuditReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// Layered proximity graph. Nodes are store rows; links[node][level] holds
/// neighbor rows, at most M per list above level 0 and 2M at level 0.
class HnswIndex {
public:
    using Links = std::vector<std::vector<std::vector<std::uint32_t>>>;

    /// Inserts rows in ascending id order. Throws EmptyStore,
    /// InvalidConfig (M < 2, ef_construction < 1).
    static HnswIndex build(VectorStore store, const HnswParams& params);
    /// Reassembles a deserialized index; callers should audit() it.
    static HnswIndex from_parts(VectorStore store, const HnswParams& params, std::uint32_t entry, Links links);

    /// Greedy descent through the upper levels, then a beam of ef_search
    /// candidates at level 0. Throws EmptyIndex, DimensionMismatch and
    /// InvalidConfig when ef_search < k.
    QueryResult search(std::span<const double> query, int k, int ef_search) const;

    /// Checks degree caps, level nesting, id validity and level-0
    /// reachability from the entry point.
    AuditReport audit() const;

    const VectorStore& store() const { return store_; }
    const HnswParams& params() const { return params_; }
    std::uint32_t entry_point() const { return entry_; }
    int max_level() const { return static_cast<int>(links_[entry_].size()) - 1; }
    const Links& links() const { return links_; }
    /// Links added after insertion to reconnect nodes that pruning had
    /// orphaned at level 0 (0 for loaded indexes).
    std::size_t repaired_links() const { return repaired_; }
    std::size_t max_degree(int level) const {
        return static_cast<std::size_t>(level == 0 ? 2 * params_.m : params_.m);
    }

private:
    struct Candidate {
        double dist;  // squared
        std::uint32_t node;
    };

    bool closer(const Candidate& a, const Candidate& b) const {
        return hit_before(a.dist, store_.id(a.node), b.dist, store_.id(b.node));
    }
    double dist(const double* q, std::uint32_t node) const { return squared_l2(q, store_.row(node), store_.dim()); }
    Candidate greedy(const double* q, Candidate ep, int level) const;
    /// Up to `ef` nearest found from `entries`, ascending.
    std::vector<Candidate> search_layer(const double* q, const std::vector<Candidate>& entries, int ef,
                                        int level) const;
    void insert(std::uint32_t node, int level);
    void shrink(std::uint32_t node, int level);
    std::vector<char> reachable_at_level0() const;
    void repair_reachability();

    VectorStore store_;
    HnswParams params_;
    std::uint32_t entry_ = 0;
    Links links_;
    std::size_t repaired_ = 0;
};

}  // namespace kgsr::index
