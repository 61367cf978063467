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

#include <list>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "kgsr/index/hnsw.hpp"
#include "kgsr/index/ivf.hpp"

namespace kgsr::index {

enum class IndexKind : std::uint8_t { Exact = 0, Hnsw = 1, Ivf = 2 };

std::string_view to_string(IndexKind kind);
/// Throws InvalidConfig for anything but hnsw, ivf or exact.
IndexKind parse_index_kind(std::string_view s);

struct SearchParams {
    int ef_search = 64;
    int nprobe = 8;
};

/// One of the three retrieval structures behind a common search call.
class VectorIndex {
public:
    explicit VectorIndex(VectorStore exact) : impl_(std::move(exact)) {}
    explicit VectorIndex(HnswIndex h) : impl_(std::move(h)) {}
    explicit VectorIndex(IvfIndex i) : impl_(std::move(i)) {}

    IndexKind kind() const { return static_cast<IndexKind>(impl_.index()); }
    const VectorStore& store() const;
    QueryResult search(std::span<const double> query, int k, const SearchParams& params = {}) const;
    AuditReport audit() const;

    const HnswIndex* hnsw() const { return std::get_if<HnswIndex>(&impl_); }
    const IvfIndex* ivf() const { return std::get_if<IvfIndex>(&impl_); }

private:
    std::variant<VectorStore, HnswIndex, IvfIndex> impl_;
};

// Snapshot layout (little-endian): "KGSI" | u32 version | u8 kind | u32 dim
// | u32 N | kind parameters | N x u32 ids | N x dim f64 vectors | kind
// payload | u32 CRC32 of every preceding byte.
inline constexpr std::uint32_t kIndexSnapshotVersion = 1;

std::vector<std::uint8_t> encode_index(const VectorIndex& index);
/// Throws CorruptSnapshot on bad magic, version, checksum or structure.
VectorIndex decode_index(std::span<const std::uint8_t> bytes);
void save_index(const std::string& path, const VectorIndex& index);
VectorIndex load_index(const std::string& path);

/// LRU memo of search results keyed by the query quantized to a fixed
/// grid, plus k and search parameters. Off unless constructed with a
/// positive capacity.
class QueryCache {
public:
    explicit QueryCache(std::size_t capacity = 0, double resolution = 1e-6)
        : capacity_(capacity), resolution_(resolution) {}

    bool enabled() const { return capacity_ > 0; }
    QueryResult search(const VectorIndex& index, std::span<const double> query, int k, const SearchParams& params);
    std::size_t hits() const { return hits_; }
    std::size_t misses() const { return misses_; }

private:
    std::string key(std::span<const double> query, int k, const SearchParams& params) const;

    std::size_t capacity_;
    double resolution_;
    std::list<std::pair<std::string, QueryResult>> order_;
    std::unordered_map<std::string, std::list<std::pair<std::string, QueryResult>>::iterator> map_;
    std::size_t hits_ = 0;
    std::size_t misses_ = 0;
};

}  // namespace kgsr::index
