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

#include "kgsr/index/ivf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kgsr/error.hpp"

namespace kgsr::index {

namespace {

// Nearest centroid, ties to the lower index.
std::size_t nearest_centroid(const Matrix& c, const double* v, int dim) {
    std::size_t best = 0;
    double best_d = squared_l2(v, c.row(0).data(), dim);
    for (Eigen::Index j = 1; j < c.rows(); ++j) {
        const double d = squared_l2(v, c.row(j).data(), dim);
        if (d < best_d) {
            best_d = d;
            best = static_cast<std::size_t>(j);
        }
    }
    return best;
}

Matrix kmeans_plus_plus(const VectorStore& store, int k, Rng& rng) {
    const std::size_t n = store.size();
    const int dim = store.dim();
    Matrix c(k, dim);
    std::size_t first = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    c.row(0) = store.vectors().row(static_cast<Eigen::Index>(first));
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = squared_l2(store.row(i), c.row(0).data(), dim);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int j = 1; j < k; ++j) {
        const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
        std::size_t pick = 0;
        if (total > 0.0) {
            // Inverse-CDF draw over squared distances.
            double target = unit(rng) * total;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                target -= d2[i];
                if (target < 0.0 && d2[i] > 0.0) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
        }
        c.row(j) = store.vectors().row(static_cast<Eigen::Index>(pick));
        for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], squared_l2(store.row(i), c.row(j).data(), dim));
    }
    return c;
}

}  // namespace

IvfIndex IvfIndex::build(VectorStore store, const IvfParams& params) {
    if (store.empty()) throw Error(ErrorCode::EmptyStore, "cannot build IVF over an empty store");
    if (params.nlist < 1 || static_cast<std::size_t>(params.nlist) > store.size())
        throw Error(ErrorCode::InvalidConfig, "nlist must be in [1, N]");
    if (params.kmeans_iters < 0) throw Error(ErrorCode::InvalidConfig, "kmeans_iters must be >= 0");

    const std::size_t n = store.size();
    const int dim = store.dim();
    Rng rng(params.seed);
    Matrix centroids = kmeans_plus_plus(store, params.nlist, rng);
    std::vector<std::size_t> assign(n);
    for (int it = 0; it <= params.kmeans_iters; ++it) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            const auto a = nearest_centroid(centroids, store.row(i), dim);
            changed |= (it == 0 || a != assign[i]);
            assign[i] = a;
        }
        if (!changed || it == params.kmeans_iters) break;
        Matrix sums = Matrix::Zero(params.nlist, dim);
        std::vector<std::size_t> counts(static_cast<std::size_t>(params.nlist), 0);
        for (std::size_t i = 0; i < n; ++i) {
            sums.row(static_cast<Eigen::Index>(assign[i])) += store.vectors().row(static_cast<Eigen::Index>(i));
            ++counts[assign[i]];
        }
        // Empty clusters keep their previous centroid.
        for (int j = 0; j < params.nlist; ++j)
            if (counts[j]) centroids.row(j) = sums.row(j) / static_cast<double>(counts[j]);
    }

    std::vector<std::vector<std::uint32_t>> lists(static_cast<std::size_t>(params.nlist));
    for (std::size_t i = 0; i < n; ++i) lists[assign[i]].push_back(static_cast<std::uint32_t>(i));
    return from_parts(std::move(store), params, std::move(centroids), std::move(lists));
}

IvfIndex IvfIndex::from_parts(VectorStore store, const IvfParams& params, Matrix centroids,
                              std::vector<std::vector<std::uint32_t>> lists) {
    if (store.empty()) throw Error(ErrorCode::EmptyIndex, "IVF index has no vectors");
    if (centroids.rows() != params.nlist || centroids.cols() != store.dim() ||
        lists.size() != static_cast<std::size_t>(params.nlist))
        throw Error(ErrorCode::CorruptSnapshot, "IVF centroids or lists do not match nlist");
    IvfIndex ix;
    ix.store_ = std::move(store);
    ix.params_ = params;
    ix.centroids_ = std::move(centroids);
    ix.lists_ = std::move(lists);
    return ix;
}

QueryResult IvfIndex::search(std::span<const double> query, int k, int nprobe) const {
    if (store_.empty()) throw Error(ErrorCode::EmptyIndex, "search on an empty IVF index");
    if (k < 1) throw Error(ErrorCode::InvalidConfig, "k must be >= 1");
    if (nprobe < 1 || nprobe > params_.nlist) throw Error(ErrorCode::InvalidConfig, "nprobe must be in [1, nlist]");
    check_query(store_, query);
    const int dim = store_.dim();

    std::vector<std::pair<double, std::uint32_t>> cd(static_cast<std::size_t>(params_.nlist));
    for (int j = 0; j < params_.nlist; ++j)
        cd[j] = {squared_l2(query.data(), centroids_.row(j).data(), dim), static_cast<std::uint32_t>(j)};
    std::partial_sort(cd.begin(), cd.begin() + nprobe, cd.end());

    std::vector<std::pair<double, std::uint32_t>> hits;
    for (int p = 0; p < nprobe; ++p)
        for (auto row : lists_[cd[p].second])
            hits.push_back({squared_l2(query.data(), store_.row(row), dim), store_.id(row)});
    const auto n = std::min<std::size_t>(hits.size(), static_cast<std::size_t>(k));
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(n), hits.end());
    QueryResult out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back({hits[i].second, std::sqrt(hits[i].first)});
    return out;
}

AuditReport IvfIndex::audit() const {
    AuditReport r;
    if (!centroids_.allFinite()) r.violations.push_back("non-finite centroid");
    std::vector<int> seen(store_.size(), 0);
    for (const auto& list : lists_) {
        for (auto row : list) {
            if (row >= store_.size()) {
                r.violations.push_back("list references unknown row " + std::to_string(row));
                return r;
            }
            ++seen[row];
        }
    }
    for (std::size_t i = 0; i < seen.size(); ++i) {
        if (seen[i] != 1) {
            r.violations.push_back("row " + std::to_string(i) + " appears in " + std::to_string(seen[i]) + " lists");
            break;
        }
    }
    return r;
}

}  // namespace kgsr::index
