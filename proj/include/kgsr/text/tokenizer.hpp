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
#include <string_view>
#include <vector>

namespace kgsr::text {

inline constexpr std::uint32_t kDefaultVocabSize = 4096;

struct TokenSeq {
    std::vector<std::uint32_t> ids;
};

std::uint64_t fnv1a64(std::string_view s);

/// Lowercases ASCII, splits on runs of ASCII non-alphanumerics (bytes >= 0x80
/// stay inside words), hashes each word with FNV-1a 64 modulo vocab_size.
/// Throws EmptyText when no word survives.
TokenSeq tokenize(std::string_view text, std::uint32_t vocab_size = kDefaultVocabSize);

/// The lowercase words tokenize() hashes, in order.
std::vector<std::string_view> split_words(std::string_view text, std::vector<char>& scratch);

}  // namespace kgsr::text
