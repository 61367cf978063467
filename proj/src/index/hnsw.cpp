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

#include "kgsr/index/hnsw.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <queue>

#include "kgsr/error.hpp"

namespace kgsr::index {

namespace {

// Per-thread visited marks, so const searches can run concurrently.
struct VisitedSet {
    std::vector<std::uint32_t> mark;
    std::uint32_t generation = 0;

    void reset(std::size_t n) {
        if (mark.size() < n) mark.assign(n, 0);
        if (++generation == 0) {
            std::fill(mark.begin(), mark.end(), 0);
            generation = 1;
        }
    }
    bool visit(std::uint32_t node) {
        if (mark[node] == generation) return false;
        mark[node] = generation;
        return true;
    }
};

thread_local VisitedSet tls_visited;

}  // namespace

HnswIndex HnswIndex::build(VectorStore store, const HnswParams& params) {
    if (store.empty()) throw Error(ErrorCode::EmptyStore, "cannot build HNSW over an empty store");
    if (params.m < 2) throw Error(ErrorCode::InvalidConfig, "HNSW needs M >= 2");
    if (params.ef_construction < 1) throw Error(ErrorCode::InvalidConfig, "ef_construction must be >= 1");

    HnswIndex h;
    h.store_ = std::move(store);
    h.params_ = params;
    const std::size_t n = h.store_.size();
    h.links_.resize(n);

    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return h.store_.id(a) < h.store_.id(b); });

    Rng rng(params.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double m_l = 1.0 / std::log(static_cast<double>(params.m));
    bool first = true;
    for (std::uint32_t node : order) {
        // 1 - U lies in (0, 1], so the log is finite.
        const int level = static_cast<int>(std::floor(-std::log(1.0 - unit(rng)) * m_l));
        h.links_[node].resize(static_cast<std::size_t>(level) + 1);
        if (first) {
            h.entry_ = node;
            first = false;
            continue;
        }
        h.insert(node, level);
    }
    h.repair_reachability();
    return h;
}

std::vector<char> HnswIndex::reachable_at_level0() const {
    std::vector<char> seen(links_.size(), 0);
    std::vector<std::uint32_t> stack{entry_};
    seen[entry_] = 1;
    while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        for (auto nb : links_[v][0]) {
            if (!seen[nb]) {
                seen[nb] = 1;
                stack.push_back(nb);
            }
        }
    }
    return seen;
}

void HnswIndex::repair_reachability() {
    // Nearest-M pruning can drop every inbound link of a node that is
    // nobody's close neighbor. Such a node would never be returned, so link
    // it from its nearest reachable node that still has level-0 capacity.
    auto seen = reachable_at_level0();
    const std::size_t n = links_.size();
    for (std::uint32_t x = 0; x < n; ++x) {
        if (seen[x]) continue;
        const double* q = store_.row(x);
        std::optional<Candidate> best;
        for (std::uint32_t r = 0; r < n; ++r) {
            if (!seen[r] || links_[r][0].size() >= max_degree(0)) continue;
            const Candidate c{dist(q, r), r};
            if (!best || closer(c, *best)) best = c;
        }
        if (!best) throw Error(ErrorCode::InvalidConfig, "no level-0 capacity left to reconnect HNSW node");
        links_[best->node][0].push_back(x);
        ++repaired_;
        // Everything reachable from x is now reachable too.
        std::vector<std::uint32_t> stack{x};
        seen[x] = 1;
        while (!stack.empty()) {
            const auto v = stack.back();
            stack.pop_back();
            for (auto nb : links_[v][0]) {
                if (!seen[nb]) {
                    seen[nb] = 1;
                    stack.push_back(nb);
                }
            }
        }
    }
}

HnswIndex HnswIndex::from_parts(VectorStore store, const HnswParams& params, std::uint32_t entry, Links links) {
    if (store.empty()) throw Error(ErrorCode::EmptyIndex, "HNSW index has no vectors");
    if (links.size() != store.size() || entry >= store.size() || links[entry].empty())
        throw Error(ErrorCode::CorruptSnapshot, "HNSW links do not match the store");
    HnswIndex h;
    h.store_ = std::move(store);
    h.params_ = params;
    h.entry_ = entry;
    h.links_ = std::move(links);
    return h;
}

HnswIndex::Candidate HnswIndex::greedy(const double* q, Candidate ep, int level) const {
    bool moved = true;
    while (moved) {
        moved = false;
        for (std::uint32_t nb : links_[ep.node][level]) {
            const Candidate c{dist(q, nb), nb};
            if (closer(c, ep)) {
                ep = c;
                moved = true;
            }
        }
    }
    return ep;
}

std::vector<HnswIndex::Candidate> HnswIndex::search_layer(const double* q, const std::vector<Candidate>& entries,
                                                          int ef, int level) const {
    auto farther = [this](const Candidate& a, const Candidate& b) { return closer(a, b); };     // max-heap
    auto nearer = [this](const Candidate& a, const Candidate& b) { return closer(b, a); };      // min-heap
    std::priority_queue<Candidate, std::vector<Candidate>, decltype(nearer)> frontier(nearer);
    std::priority_queue<Candidate, std::vector<Candidate>, decltype(farther)> best(farther);

    auto& visited = tls_visited;
    visited.reset(store_.size());
    for (const auto& e : entries) {
        if (!visited.visit(e.node)) continue;
        frontier.push(e);
        best.push(e);
    }
    while (static_cast<int>(best.size()) > ef) best.pop();

    while (!frontier.empty()) {
        const Candidate c = frontier.top();
        if (static_cast<int>(best.size()) >= ef && closer(best.top(), c)) break;
        frontier.pop();
        for (std::uint32_t nb : links_[c.node][level]) {
            if (!visited.visit(nb)) continue;
            const Candidate cand{dist(q, nb), nb};
            if (static_cast<int>(best.size()) < ef || closer(cand, best.top())) {
                frontier.push(cand);
                best.push(cand);
                if (static_cast<int>(best.size()) > ef) best.pop();
            }
        }
    }
    std::vector<Candidate> out(best.size());
    for (auto i = out.size(); i-- > 0;) {
        out[i] = best.top();
        best.pop();
    }
    return out;
}

void HnswIndex::shrink(std::uint32_t node, int level) {
    auto& list = links_[node][level];
    if (list.size() <= max_degree(level)) return;
    const double* q = store_.row(node);
    std::vector<Candidate> c;
    c.reserve(list.size());
    for (auto nb : list) c.push_back({dist(q, nb), nb});
    std::sort(c.begin(), c.end(), [this](const auto& a, const auto& b) { return closer(a, b); });
    list.clear();
    for (std::size_t i = 0; i < max_degree(level); ++i) list.push_back(c[i].node);
}

void HnswIndex::insert(std::uint32_t node, int level) {
    const double* q = store_.row(node);
    const int top = max_level();
    Candidate ep{dist(q, entry_), entry_};
    for (int l = top; l > level; --l) ep = greedy(q, ep, l);

    std::vector<Candidate> entries{ep};
    for (int l = std::min(level, top); l >= 0; --l) {
        auto found = search_layer(q, entries, params_.ef_construction, l);
        // Simple heuristic: link to the M nearest.
        const std::size_t keep = std::min<std::size_t>(found.size(), static_cast<std::size_t>(params_.m));
        auto& mine = links_[node][l];
        for (std::size_t i = 0; i < keep; ++i) {
            mine.push_back(found[i].node);
            links_[found[i].node][l].push_back(node);
            shrink(found[i].node, l);
        }
        entries = std::move(found);
    }
    if (level > top) entry_ = node;
}

QueryResult HnswIndex::search(std::span<const double> query, int k, int ef_search) const {
    if (store_.empty()) throw Error(ErrorCode::EmptyIndex, "search on an empty HNSW index");
    if (k < 1) throw Error(ErrorCode::InvalidConfig, "k must be >= 1");
    if (ef_search < k) throw Error(ErrorCode::InvalidConfig, "ef_search must be >= k");
    check_query(store_, query);
    const double* q = query.data();
    Candidate ep{dist(q, entry_), entry_};
    for (int l = max_level(); l > 0; --l) ep = greedy(q, ep, l);
    const auto found = search_layer(q, {ep}, ef_search, 0);
    QueryResult out;
    const std::size_t n = std::min<std::size_t>(found.size(), static_cast<std::size_t>(k));
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back({store_.id(found[i].node), std::sqrt(found[i].dist)});
    return out;
}

AuditReport HnswIndex::audit() const {
    AuditReport r;
    auto fail = [&](std::string msg) {
        if (r.violations.size() < 50) r.violations.push_back(std::move(msg));
    };
    const std::size_t n = store_.size();
    if (links_.size() != n) {
        fail("link table has " + std::to_string(links_.size()) + " nodes for " + std::to_string(n) + " vectors");
        return r;
    }
    if (entry_ >= n) {
        fail("entry point out of range");
        return r;
    }
    const int top = max_level();
    for (std::size_t v = 0; v < n; ++v) {
        // Each node stores one list per level 0..L, so presence at level L
        // implies presence below; an empty table means it is missing at 0.
        if (links_[v].empty()) fail("node " + std::to_string(v) + " missing from level 0");
        if (static_cast<int>(links_[v].size()) - 1 > top)
            fail("node " + std::to_string(v) + " above the entry point's level");
        for (std::size_t l = 0; l < links_[v].size(); ++l) {
            const auto& list = links_[v][l];
            if (list.size() > max_degree(static_cast<int>(l)))
                fail("node " + std::to_string(v) + " level " + std::to_string(l) + " degree " +
                     std::to_string(list.size()));
            std::vector<std::uint32_t> sorted(list);
            std::sort(sorted.begin(), sorted.end());
            if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
                fail("node " + std::to_string(v) + " has duplicate links");
            for (auto nb : list) {
                if (nb >= n) {
                    fail("node " + std::to_string(v) + " links to unknown node " + std::to_string(nb));
                } else if (nb == v) {
                    fail("node " + std::to_string(v) + " links to itself");
                } else if (links_[nb].size() <= l) {
                    fail("node " + std::to_string(v) + " links to node " + std::to_string(nb) + " absent at level " +
                         std::to_string(l));
                }
            }
        }
    }
    if (!r.ok()) return r;

    const auto seen = reachable_at_level0();
    const auto reached = static_cast<std::size_t>(std::count(seen.begin(), seen.end(), 1));
    if (reached != n)
        fail(std::to_string(n - reached) + " of " + std::to_string(n) + " nodes unreachable from the entry point");
    return r;
}

}  // namespace kgsr::index
