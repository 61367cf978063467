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

#include "kgsr/index/vector_index.hpp"

#include <cmath>

#include "kgsr/error.hpp"

namespace kgsr::index {

std::string_view to_string(IndexKind kind) {
    switch (kind) {
        case IndexKind::Exact: return "exact";
        case IndexKind::Hnsw: return "hnsw";
        case IndexKind::Ivf: return "ivf";
    }
    return "?";
}

IndexKind parse_index_kind(std::string_view s) {
    if (s == "exact") return IndexKind::Exact;
    if (s == "hnsw") return IndexKind::Hnsw;
    if (s == "ivf") return IndexKind::Ivf;
    throw Error(ErrorCode::InvalidConfig, "unknown index kind `" + std::string(s) + "` (want hnsw|ivf|exact)");
}

const VectorStore& VectorIndex::store() const {
    return std::visit(
        [](const auto& x) -> const VectorStore& {
            if constexpr (std::is_same_v<std::decay_t<decltype(x)>, VectorStore>) {
                return x;
            } else {
                return x.store();
            }
        },
        impl_);
}

QueryResult VectorIndex::search(std::span<const double> query, int k, const SearchParams& params) const {
    switch (kind()) {
        case IndexKind::Exact: return exact_search(std::get<VectorStore>(impl_), query, k);
        case IndexKind::Hnsw: return std::get<HnswIndex>(impl_).search(query, k, std::max(k, params.ef_search));
        case IndexKind::Ivf: {
            const auto& ivf = std::get<IvfIndex>(impl_);
            return ivf.search(query, k, std::min(params.nprobe, ivf.params().nlist));
        }
    }
    throw Error(ErrorCode::InvalidConfig, "unknown index kind");
}

AuditReport VectorIndex::audit() const {
    if (const auto* h = hnsw()) return h->audit();
    if (const auto* i = ivf()) return i->audit();
    return {};
}

std::string QueryCache::key(std::span<const double> query, int k, const SearchParams& params) const {
    std::string out;
    out.reserve(query.size() * 8 + 12);
    auto put = [&](std::int64_t v) { out.append(reinterpret_cast<const char*>(&v), sizeof v); };
    put(k);
    put(params.ef_search);
    put(params.nprobe);
    for (double x : query) put(std::llround(x / resolution_));
    return out;
}

QueryResult QueryCache::search(const VectorIndex& index, std::span<const double> query, int k,
                               const SearchParams& params) {
    if (!enabled()) return index.search(query, k, params);
    const std::string kk = key(query, k, params);
    if (auto it = map_.find(kk); it != map_.end()) {
        ++hits_;
        order_.splice(order_.begin(), order_, it->second);
        return it->second->second;
    }
    ++misses_;
    QueryResult r = index.search(query, k, params);
    order_.emplace_front(kk, r);
    map_[kk] = order_.begin();
    if (order_.size() > capacity_) {
        map_.erase(order_.back().first);
        order_.pop_back();
    }
    return r;
}

}  // namespace kgsr::index
