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

#include <cstdint>
#include <span>
#include <vector>

#include "kgsr/types.hpp"

namespace kgsr::index {

/// Vectors to search over, keyed by caller-chosen ids (ad entity ids in
/// the pipeline). Immutable once made.
class VectorStore {
public:
    VectorStore() = default;
    /// Throws EmptyStore, LengthMismatch, NonFiniteInput, or InvalidConfig
    /// for duplicate ids.
    static VectorStore make(std::vector<std::uint32_t> ids, Matrix vectors);

    std::size_t size() const { return ids_.size(); }
    int dim() const { return static_cast<int>(vectors_.cols()); }
    bool empty() const { return ids_.empty(); }
    std::uint32_t id(std::size_t row) const { return ids_[row]; }
    const std::vector<std::uint32_t>& ids() const { return ids_; }
    const Matrix& vectors() const { return vectors_; }
    const double* row(std::size_t r) const { return vectors_.data() + r * static_cast<std::size_t>(vectors_.cols()); }

private:
    std::vector<std::uint32_t> ids_;
    Matrix vectors_;
};

struct Hit {
    std::uint32_t id;
    double distance;  // L2, not squared

    friend bool operator==(const Hit&, const Hit&) = default;
};

/// Ascending by distance, ties by ascending id.
using QueryResult = std::vector<Hit>;

double squared_l2(const double* a, const double* b, int dim);

/// Order used everywhere results are ranked.
inline bool hit_before(double d_a, std::uint32_t id_a, double d_b, std::uint32_t id_b) {
    return d_a < d_b || (d_a == d_b && id_a < id_b);
}

/// True k nearest by full scan. Throws EmptyStore, DimensionMismatch,
/// InvalidConfig for k < 1.
QueryResult exact_search(const VectorStore& store, std::span<const double> query, int k);

/// Throws DimensionMismatch unless query has store.dim() entries.
void check_query(const VectorStore& store, std::span<const double> query);

/// Fraction of `truth`'s ids that appear in `found`.
double recall(const QueryResult& found, const QueryResult& truth);

}  // namespace kgsr::index
