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

#include <cstring>

#include "kgsr/error.hpp"
#include "kgsr/index/vector_index.hpp"
#include "kgsr/io/binary.hpp"

namespace kgsr::index {

namespace {

constexpr char kMagic[4] = {'K', 'G', 'S', 'I'};

[[noreturn]] void corrupt(const std::string& msg) { throw Error(ErrorCode::CorruptSnapshot, "index snapshot: " + msg); }

void put_store(io::ByteWriter& w, const VectorStore& s) {
    for (auto id : s.ids()) w.u32(id);
    const auto& v = s.vectors();
    for (Eigen::Index i = 0; i < v.size(); ++i) w.f64(v.data()[i]);
}

}  // namespace

std::vector<std::uint8_t> encode_index(const VectorIndex& index) {
    const VectorStore& s = index.store();
    if (s.empty()) throw Error(ErrorCode::EmptyIndex, "refusing to save an empty index");
    io::ByteWriter w;
    w.bytes({kMagic, 4});
    w.u32(kIndexSnapshotVersion);
    w.u8(static_cast<std::uint8_t>(index.kind()));
    w.u32(static_cast<std::uint32_t>(s.dim()));
    w.u32(static_cast<std::uint32_t>(s.size()));

    if (const auto* h = index.hnsw()) {
        w.u32(static_cast<std::uint32_t>(h->params().m));
        w.u32(static_cast<std::uint32_t>(h->params().ef_construction));
        w.u64(h->params().seed);
        w.u32(h->entry_point());
        put_store(w, s);
        for (const auto& levels : h->links()) {
            w.u8(static_cast<std::uint8_t>(levels.size()));
            for (const auto& list : levels) {
                w.u16(static_cast<std::uint16_t>(list.size()));
                for (auto nb : list) w.u32(nb);
            }
        }
    } else if (const auto* iv = index.ivf()) {
        w.u32(static_cast<std::uint32_t>(iv->params().nlist));
        w.u32(static_cast<std::uint32_t>(iv->params().kmeans_iters));
        w.u64(iv->params().seed);
        put_store(w, s);
        const auto& c = iv->centroids();
        for (Eigen::Index i = 0; i < c.size(); ++i) w.f64(c.data()[i]);
        for (const auto& list : iv->lists()) {
            w.u32(static_cast<std::uint32_t>(list.size()));
            for (auto row : list) w.u32(row);
        }
    } else {
        put_store(w, s);
    }
    w.u32(io::crc32(w.data()));
    return w.take();
}

VectorIndex decode_index(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4 + 4 + 1 + 4 + 4 + 4) corrupt("truncated header");
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) corrupt("bad magic");
    const auto body = bytes.first(bytes.size() - 4);
    io::ByteReader tail(bytes.last(4));
    if (tail.u32() != io::crc32(body)) corrupt("checksum mismatch");

    io::ByteReader r(body);
    r.bytes(4);
    const auto version = r.u32();
    if (version != kIndexSnapshotVersion) corrupt("unsupported version " + std::to_string(version));
    const auto kind = r.u8();
    if (kind > 2) corrupt("unknown index kind " + std::to_string(kind));
    const auto dim = r.u32();
    const auto n = r.u32();
    if (dim == 0 || n == 0) corrupt("empty index");

    auto read_store = [&] {
        if (r.remaining() / 12 < static_cast<std::size_t>(n) ||
            r.remaining() / 8 < static_cast<std::size_t>(n) * dim)
            corrupt("truncated vector payload");
        std::vector<std::uint32_t> ids(n);
        for (auto& id : ids) id = r.u32();
        Matrix v(n, dim);
        for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = r.f64();
        try {
            return VectorStore::make(std::move(ids), std::move(v));
        } catch (const Error& e) {
            corrupt(e.what());
        }
    };

    std::optional<VectorIndex> out;
    switch (static_cast<IndexKind>(kind)) {
        case IndexKind::Hnsw: {
            HnswParams p;
            p.m = static_cast<int>(r.u32());
            p.ef_construction = static_cast<int>(r.u32());
            p.seed = r.u64();
            const auto entry = r.u32();
            VectorStore store = read_store();
            HnswIndex::Links links(n);
            for (auto& levels : links) {
                const auto count = r.u8();
                levels.resize(count);
                for (auto& list : levels) {
                    const auto deg = r.u16();
                    list.resize(deg);
                    for (auto& nb : list) nb = r.u32();
                }
            }
            out.emplace(HnswIndex::from_parts(std::move(store), p, entry, std::move(links)));
            break;
        }
        case IndexKind::Ivf: {
            IvfParams p;
            p.nlist = static_cast<int>(r.u32());
            p.kmeans_iters = static_cast<int>(r.u32());
            p.seed = r.u64();
            if (p.nlist < 1 || static_cast<std::uint32_t>(p.nlist) > n) corrupt("nlist out of range");
            VectorStore store = read_store();
            if (r.remaining() / 8 < static_cast<std::size_t>(p.nlist) * dim) corrupt("truncated centroids");
            Matrix c(p.nlist, dim);
            for (Eigen::Index i = 0; i < c.size(); ++i) c.data()[i] = r.f64();
            std::vector<std::vector<std::uint32_t>> lists(static_cast<std::size_t>(p.nlist));
            for (auto& list : lists) {
                const auto len = r.u32();
                if (len > n) corrupt("inverted list longer than the store");
                list.resize(len);
                for (auto& row : list) row = r.u32();
            }
            out.emplace(IvfIndex::from_parts(std::move(store), p, std::move(c), std::move(lists)));
            break;
        }
        case IndexKind::Exact: out.emplace(read_store()); break;
    }
    if (r.remaining() != 0) corrupt("trailing bytes");
    const auto audit = out->audit();
    if (!audit.ok()) corrupt("structural audit failed: " + audit.violations.front());
    return std::move(*out);
}

void save_index(const std::string& path, const VectorIndex& index) { io::write_file(path, encode_index(index)); }

VectorIndex load_index(const std::string& path) {
    const auto bytes = io::read_file(path);
    return decode_index(bytes);
}

}  // namespace kgsr::index
