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

#include <vector>

#include "kgsr/index/hnsw.hpp"
#include "kgsr/index/vector_store.hpp"

namespace kgsr::index {

struct IvfParams {
    int nlist = 64;
    int kmeans_iters = 20;
    std::uint64_t seed = 42;
};

/// k-means coarse quantizer with exhaustive scans of the probed lists.
class IvfIndex {
public:
    /// k-means++ seeding then Lloyd iterations. Throws EmptyStore, and
    /// InvalidConfig when nlist is outside [1, N].
    static IvfIndex build(VectorStore store, const IvfParams& params);
    static IvfIndex from_parts(VectorStore store, const IvfParams& params, Matrix centroids,
                               std::vector<std::vector<std::uint32_t>> lists);

    /// Scans the nprobe lists whose centroids are nearest. Throws
    /// EmptyIndex, DimensionMismatch, InvalidConfig (nprobe outside [1, nlist]).
    QueryResult search(std::span<const double> query, int k, int nprobe) const;

    /// Checks that the lists partition the store and centroids are finite.
    AuditReport audit() const;

    const VectorStore& store() const { return store_; }
    const IvfParams& params() const { return params_; }
    const Matrix& centroids() const { return centroids_; }
    const std::vector<std::vector<std::uint32_t>>& lists() const { return lists_; }  // store rows

private:
    VectorStore store_;
    IvfParams params_;
    Matrix centroids_;
    std::vector<std::vector<std::uint32_t>> lists_;
};

}  // namespace kgsr::index
