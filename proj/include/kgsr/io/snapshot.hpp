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
#include <string>
#include <vector>

#include "kgsr/types.hpp"

namespace kgsr::io {

// `KGSR` container. Version 1 holds one row-major float32 matrix:
//   magic | u32 version | u32 rows | u32 cols | rows*cols f32
// Version 2 holds a table of named blocks:
//   magic | u32 version | u32 count | { u16 name_len | name | u32 rows | u32 cols | f32... }*
// All integers and floats little-endian.
inline constexpr char kModelMagic[4] = {'K', 'G', 'S', 'R'};
inline constexpr std::uint32_t kMatrixSnapshotVersion = 1;
inline constexpr std::uint32_t kSectionSnapshotVersion = 2;

struct NamedBlock {
    std::string name;
    Matrix value;
};

std::vector<std::uint8_t> encode_matrix(const Matrix& m);
Matrix decode_matrix(const std::vector<std::uint8_t>& bytes);

std::vector<std::uint8_t> encode_sections(const std::vector<NamedBlock>& blocks);
std::vector<NamedBlock> decode_sections(const std::vector<std::uint8_t>& bytes);

void save_matrix(const std::string& path, const Matrix& m);
Matrix load_matrix(const std::string& path);

}  // namespace kgsr::io
