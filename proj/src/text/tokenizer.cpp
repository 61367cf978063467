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

#include "kgsr/text/tokenizer.hpp"

#include "kgsr/error.hpp"

namespace kgsr::text {

namespace {

bool is_word_byte(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

char lower(unsigned char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c); }

}  // namespace

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::vector<std::string_view> split_words(std::string_view text, std::vector<char>& scratch) {
    scratch.assign(text.size(), '\0');
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && !is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
        const std::size_t start = i;
        while (i < text.size() && is_word_byte(static_cast<unsigned char>(text[i]))) {
            scratch[i] = lower(static_cast<unsigned char>(text[i]));
            ++i;
        }
        if (i > start) spans.emplace_back(start, i - start);
    }
    std::vector<std::string_view> words;
    words.reserve(spans.size());
    for (auto [s, n] : spans) words.emplace_back(scratch.data() + s, n);
    return words;
}

TokenSeq tokenize(std::string_view text, std::uint32_t vocab_size) {
    if (vocab_size == 0) throw Error(ErrorCode::InvalidConfig, "vocab_size must be positive");
    std::vector<char> scratch;
    TokenSeq seq;
    for (auto w : split_words(text, scratch)) {
        seq.ids.push_back(static_cast<std::uint32_t>(fnv1a64(w) % vocab_size));
    }
    if (seq.ids.empty()) throw Error(ErrorCode::EmptyText, "no tokens after normalization");
    return seq;
}

}  // namespace kgsr::text
