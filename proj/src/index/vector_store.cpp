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

#include "kgsr/index/vector_store.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "kgsr/error.hpp"

namespace kgsr::index {

VectorStore VectorStore::make(std::vector<std::uint32_t> ids, Matrix vectors) {
    if (ids.empty()) throw Error(ErrorCode::EmptyStore, "vector store needs at least one vector");
    if (static_cast<Eigen::Index>(ids.size()) != vectors.rows())
        throw Error(ErrorCode::LengthMismatch, std::to_string(ids.size()) + " ids for " +
                                                   std::to_string(vectors.rows()) + " vectors");
    if (vectors.cols() < 1) throw Error(ErrorCode::DimensionMismatch, "vectors need at least one dimension");
    if (!vectors.allFinite()) throw Error(ErrorCode::NonFiniteInput, "vector store contains NaN or Inf");
    std::unordered_set<std::uint32_t> seen;
    for (auto id : ids)
        if (!seen.insert(id).second) throw Error(ErrorCode::InvalidConfig, "duplicate id " + std::to_string(id));
    VectorStore s;
    s.ids_ = std::move(ids);
    s.vectors_ = std::move(vectors);
    return s;
}

double squared_l2(const double* a, const double* b, int dim) {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

void check_query(const VectorStore& store, std::span<const double> query) {
    if (static_cast<int>(query.size()) != store.dim())
        throw Error(ErrorCode::DimensionMismatch, "query has " + std::to_string(query.size()) +
                                                      " dimensions, index has " + std::to_string(store.dim()));
}

QueryResult exact_search(const VectorStore& store, std::span<const double> query, int k) {
    if (store.empty()) throw Error(ErrorCode::EmptyStore, "exact search over an empty store");
    if (k < 1) throw Error(ErrorCode::InvalidConfig, "k must be >= 1");
    check_query(store, query);
    std::vector<std::pair<double, std::uint32_t>> all(store.size());
    for (std::size_t r = 0; r < store.size(); ++r) all[r] = {squared_l2(query.data(), store.row(r), store.dim()), store.id(r)};
    const auto n = std::min<std::size_t>(static_cast<std::size_t>(k), all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n), all.end());
    QueryResult out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back({all[i].second, std::sqrt(all[i].first)});
    return out;
}

double recall(const QueryResult& found, const QueryResult& truth) {
    if (truth.empty()) return 1.0;
    std::unordered_set<std::uint32_t> ids;
    for (const auto& h : found) ids.insert(h.id);
    std::size_t hit = 0;
    for (const auto& h : truth) hit += ids.count(h.id);
    return static_cast<double>(hit) / static_cast<double>(truth.size());
}

}  // namespace kgsr::index
