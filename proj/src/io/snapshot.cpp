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

#include "kgsr/io/snapshot.hpp"

#include <cstring>
#include <limits>

#include "kgsr/error.hpp"
#include "kgsr/io/binary.hpp"

namespace kgsr::io {

namespace {

void write_payload(ByteWriter& w, const Matrix& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) w.f32(static_cast<float>(m(r, c)));
    }
}

Matrix read_payload(ByteReader& r, std::uint32_t rows, std::uint32_t cols) {
    if (static_cast<std::uint64_t>(rows) * cols * 4 > r.remaining()) {
        throw Error(ErrorCode::CorruptSnapshot, "payload shorter than declared shape");
    }
    Matrix m(rows, cols);
    for (std::uint32_t i = 0; i < rows; ++i) {
        for (std::uint32_t j = 0; j < cols; ++j) m(i, j) = r.f32();
    }
    return m;
}

void expect_header(ByteReader& r, std::uint32_t version) {
    if (r.bytes(4) != std::string(kModelMagic, 4)) {
        throw Error(ErrorCode::CorruptSnapshot, "bad magic (expected KGSR)");
    }
    auto v = r.u32();
    if (v != version) {
        throw Error(ErrorCode::CorruptSnapshot,
                    "unsupported version " + std::to_string(v) + " (expected " + std::to_string(version) + ")");
    }
}

}  // namespace

std::vector<std::uint8_t> encode_matrix(const Matrix& m) {
    ByteWriter w;
    w.bytes(std::string_view(kModelMagic, 4));
    w.u32(kMatrixSnapshotVersion);
    w.u32(static_cast<std::uint32_t>(m.rows()));
    w.u32(static_cast<std::uint32_t>(m.cols()));
    write_payload(w, m);
    return w.take();
}

Matrix decode_matrix(const std::vector<std::uint8_t>& bytes) {
    ByteReader r(bytes);
    expect_header(r, kMatrixSnapshotVersion);
    const auto rows = r.u32();
    const auto cols = r.u32();
    Matrix m = read_payload(r, rows, cols);
    if (r.remaining() != 0) throw Error(ErrorCode::CorruptSnapshot, "trailing bytes after matrix");
    return m;
}

std::vector<std::uint8_t> encode_sections(const std::vector<NamedBlock>& blocks) {
    ByteWriter w;
    w.bytes(std::string_view(kModelMagic, 4));
    w.u32(kSectionSnapshotVersion);
    w.u32(static_cast<std::uint32_t>(blocks.size()));
    for (const auto& b : blocks) {
        if (b.name.size() > std::numeric_limits<std::uint16_t>::max()) {
            throw Error(ErrorCode::InvalidConfig, "block name too long: " + b.name.substr(0, 32));
        }
        w.u16(static_cast<std::uint16_t>(b.name.size()));
        w.bytes(b.name);
        w.u32(static_cast<std::uint32_t>(b.value.rows()));
        w.u32(static_cast<std::uint32_t>(b.value.cols()));
        write_payload(w, b.value);
    }
    return w.take();
}

std::vector<NamedBlock> decode_sections(const std::vector<std::uint8_t>& bytes) {
    ByteReader r(bytes);
    expect_header(r, kSectionSnapshotVersion);
    const auto count = r.u32();
    std::vector<NamedBlock> blocks;
    for (std::uint32_t i = 0; i < count; ++i) {
        NamedBlock b;
        b.name = r.bytes(r.u16());
        const auto rows = r.u32();
        const auto cols = r.u32();
        b.value = read_payload(r, rows, cols);
        blocks.push_back(std::move(b));
    }
    if (r.remaining() != 0) throw Error(ErrorCode::CorruptSnapshot, "trailing bytes after section table");
    return blocks;
}

void save_matrix(const std::string& path, const Matrix& m) { write_file(path, encode_matrix(m)); }

Matrix load_matrix(const std::string& path) { return decode_matrix(read_file(path)); }

}  // namespace kgsr::io
