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

#include <string>
#include <vector>

#include "kgsr/text/tokenizer.hpp"
#include "kgsr/types.hpp"

namespace kgsr::text {

/// Single-head self-attention block: token lookup, Q/K/V projections,
/// row-softmax attention scaled by 1/sqrt(d), mean pooling. No positional
/// encoding, so the pooled output is invariant to token order.
struct EncoderParams {
    Matrix token_table;  // vocab x d
    Matrix w_q;          // d x d, applied as X * w_q
    Matrix w_k;
    Matrix w_v;

    int dim() const { return static_cast<int>(token_table.cols()); }
    std::uint32_t vocab_size() const { return static_cast<std::uint32_t>(token_table.rows()); }

    static EncoderParams init(std::uint32_t vocab_size, int dim, Rng& rng);
};

struct EncoderGradients {
    Matrix token_table;
    Matrix w_q;
    Matrix w_k;
    Matrix w_v;

    static EncoderGradients zeros_like(const EncoderParams& p);
};

enum class SourceKind { Ad, User, Other };

struct SemanticEmbedding {
    Vector vector;
    SourceKind source_kind = SourceKind::Ad;
};

struct AttentionCache {
    Matrix x;
    Matrix q;
    Matrix k;
    Matrix v;
    Matrix a;  // T x T attention weights
    Matrix z;
};

/// Row softmax of scaled logits, stable under large inputs.
Matrix row_softmax(const Matrix& logits);

/// Z = softmax(Q K^T / sqrt(d)) V with Q = X W_Q etc. Throws NonFiniteInput.
Matrix self_attention(const Matrix& x, const EncoderParams& params, AttentionCache* cache = nullptr);

SemanticEmbedding encode(const TokenSeq& tokens, const EncoderParams& params, AttentionCache* cache = nullptr,
                         SourceKind kind = SourceKind::Ad);

/// Tags are sorted, joined with spaces and tokenized. Throws EmptyTagList.
TokenSeq user_tokens(std::vector<std::string> tags, std::uint32_t vocab_size);
SemanticEmbedding encode_user(const std::vector<std::string>& interest_tags, const EncoderParams& params);

/// Backpropagates d(loss)/d(pooled embedding) into the parameter gradients.
void encode_backward(const TokenSeq& tokens, const EncoderParams& params, const AttentionCache& cache,
                     const Vector& d_embedding, EncoderGradients& grads);

/// Every sequence of a batch stacked into one tall matrix so the projections
/// run as a single product each. Rows of sequence i live at
/// [offsets[i], offsets[i + 1]).
struct PackedAttention {
    std::vector<Eigen::Index> offsets;
    Matrix q;
    Matrix k;
    Matrix v;
    std::vector<Matrix> a;
};

/// Pooled embeddings for many sequences, one row each. Same values as
/// calling encode() per sequence.
Matrix encode_all(const std::vector<TokenSeq>& seqs, const EncoderParams& params, PackedAttention* cache = nullptr);

/// Row i of d_pooled is the upstream gradient of sequence i; all-zero rows
/// are skipped.
void encode_all_backward(const std::vector<TokenSeq>& seqs, const EncoderParams& params, const PackedAttention& cache,
                         const Matrix& d_pooled, EncoderGradients& grads);

}  // namespace kgsr::text
