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

#include "kgsr/text/encoder.hpp"

#include <algorithm>
#include <cmath>

#include "kgsr/error.hpp"

namespace kgsr::text {

EncoderParams EncoderParams::init(std::uint32_t vocab_size, int dim, Rng& rng) {
    EncoderParams p;
    std::normal_distribution<double> tok(0.0, 1.0);
    p.token_table.resize(vocab_size, dim);
    for (Eigen::Index i = 0; i < p.token_table.size(); ++i) p.token_table.data()[i] = tok(rng);
    const double bound = std::sqrt(6.0 / (2.0 * dim));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (Matrix* w : {&p.w_q, &p.w_k, &p.w_v}) {
        w->resize(dim, dim);
        for (Eigen::Index i = 0; i < w->size(); ++i) w->data()[i] = u(rng);
    }
    return p;
}

EncoderGradients EncoderGradients::zeros_like(const EncoderParams& p) {
    return {Matrix::Zero(p.token_table.rows(), p.token_table.cols()), Matrix::Zero(p.w_q.rows(), p.w_q.cols()),
            Matrix::Zero(p.w_k.rows(), p.w_k.cols()), Matrix::Zero(p.w_v.rows(), p.w_v.cols())};
}

Matrix row_softmax(const Matrix& logits) {
    Matrix out(logits.rows(), logits.cols());
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        const double m = logits.row(i).maxCoeff();
        out.row(i) = (logits.row(i).array() - m).exp().matrix();
        out.row(i) /= out.row(i).sum();
    }
    return out;
}

Matrix self_attention(const Matrix& x, const EncoderParams& params, AttentionCache* cache) {
    if (x.rows() < 1) throw Error(ErrorCode::EmptyText, "attention over an empty sequence");
    if (x.cols() != params.dim()) throw Error(ErrorCode::ShapeMismatch, "token width does not match encoder width");
    if (!x.allFinite()) throw Error(ErrorCode::NonFiniteInput, "non-finite value in attention input");
    const double scale = 1.0 / std::sqrt(static_cast<double>(params.dim()));
    Matrix q = x * params.w_q;
    Matrix k = x * params.w_k;
    Matrix v = x * params.w_v;
    Matrix a = row_softmax(scale * (q * k.transpose()));
    Matrix z = a * v;
    if (cache) {
        cache->x = x;
        cache->q = std::move(q);
        cache->k = std::move(k);
        cache->v = std::move(v);
        cache->a = std::move(a);
        cache->z = z;
    }
    return z;
}

SemanticEmbedding encode(const TokenSeq& tokens, const EncoderParams& params, AttentionCache* cache,
                         SourceKind kind) {
    if (tokens.ids.empty()) throw Error(ErrorCode::EmptyText, "empty token sequence");
    Matrix x(static_cast<Eigen::Index>(tokens.ids.size()), params.dim());
    for (std::size_t t = 0; t < tokens.ids.size(); ++t) {
        if (tokens.ids[t] >= params.vocab_size()) {
            throw Error(ErrorCode::ShapeMismatch, "token id " + std::to_string(tokens.ids[t]) + " outside vocabulary");
        }
        x.row(static_cast<Eigen::Index>(t)) = params.token_table.row(tokens.ids[t]);
    }
    Matrix z = self_attention(x, params, cache);
    return {z.colwise().mean().transpose(), kind};
}

TokenSeq user_tokens(std::vector<std::string> tags, std::uint32_t vocab_size) {
    if (tags.empty()) throw Error(ErrorCode::EmptyTagList, "user has no interest tags");
    std::sort(tags.begin(), tags.end());
    std::string joined;
    for (const auto& t : tags) {
        if (!joined.empty()) joined += ' ';
        joined += t;
    }
    return tokenize(joined, vocab_size);
}

SemanticEmbedding encode_user(const std::vector<std::string>& interest_tags, const EncoderParams& params) {
    return encode(user_tokens(interest_tags, params.vocab_size()), params, nullptr, SourceKind::User);
}

void encode_backward(const TokenSeq& tokens, const EncoderParams& params, const AttentionCache& cache,
                     const Vector& d_embedding, EncoderGradients& grads) {
    const auto len = static_cast<Eigen::Index>(tokens.ids.size());
    const double scale = 1.0 / std::sqrt(static_cast<double>(params.dim()));

    // Mean pooling spreads the upstream gradient evenly over the rows of Z.
    Matrix dz = (d_embedding.transpose() / static_cast<double>(len)).replicate(len, 1);
    Matrix da = dz * cache.v.transpose();
    Matrix dv = cache.a.transpose() * dz;
    // Softmax Jacobian, row by row.
    Matrix ds(len, len);
    for (Eigen::Index i = 0; i < len; ++i) {
        const double dot = cache.a.row(i).dot(da.row(i));
        ds.row(i) = (cache.a.row(i).array() * (da.row(i).array() - dot)).matrix();
    }
    ds *= scale;
    Matrix dq = ds * cache.k;
    Matrix dk = ds.transpose() * cache.q;

    grads.w_q.noalias() += cache.x.transpose() * dq;
    grads.w_k.noalias() += cache.x.transpose() * dk;
    grads.w_v.noalias() += cache.x.transpose() * dv;
    Matrix dx = dq * params.w_q.transpose();
    dx.noalias() += dk * params.w_k.transpose();
    dx.noalias() += dv * params.w_v.transpose();
    for (Eigen::Index t = 0; t < len; ++t) grads.token_table.row(tokens.ids[static_cast<std::size_t>(t)]) += dx.row(t);
}

Matrix encode_all(const std::vector<TokenSeq>& seqs, const EncoderParams& params, PackedAttention* cache) {
    const auto n = static_cast<Eigen::Index>(seqs.size());
    std::vector<Eigen::Index> offsets(seqs.size() + 1, 0);
    for (std::size_t i = 0; i < seqs.size(); ++i) {
        if (seqs[i].ids.empty()) throw Error(ErrorCode::EmptyText, "empty token sequence");
        for (const auto id : seqs[i].ids) {
            if (id >= params.vocab_size()) {
                throw Error(ErrorCode::ShapeMismatch, "token id " + std::to_string(id) + " outside vocabulary");
            }
        }
        offsets[i + 1] = offsets[i] + static_cast<Eigen::Index>(seqs[i].ids.size());
    }
    if (!params.token_table.allFinite()) throw Error(ErrorCode::NonFiniteInput, "non-finite value in attention input");
    const double scale = 1.0 / std::sqrt(static_cast<double>(params.dim()));
    // Project the vocabulary once and gather, far cheaper than projecting
    // every token occurrence.
    const Matrix tq = params.token_table * params.w_q;
    const Matrix tk = params.token_table * params.w_k;
    const Matrix tv = params.token_table * params.w_v;
    Matrix q(offsets.back(), params.dim());
    Matrix k(offsets.back(), params.dim());
    Matrix v(offsets.back(), params.dim());
    for (std::size_t i = 0; i < seqs.size(); ++i) {
        for (std::size_t t = 0; t < seqs[i].ids.size(); ++t) {
            const auto r = offsets[i] + static_cast<Eigen::Index>(t);
            const auto id = seqs[i].ids[t];
            q.row(r) = tq.row(id);
            k.row(r) = tk.row(id);
            v.row(r) = tv.row(id);
        }
    }

    Matrix pooled(n, params.dim());
    std::vector<Matrix> attn;
    if (cache) attn.resize(seqs.size());
    for (std::size_t i = 0; i < seqs.size(); ++i) {
        const auto lo = offsets[i];
        const auto len = offsets[i + 1] - lo;
        Matrix a = row_softmax(scale * (q.middleRows(lo, len) * k.middleRows(lo, len).transpose()));
        // mean over rows of A V equals (column mean of A) V
        pooled.row(static_cast<Eigen::Index>(i)) =
            (a.colwise().sum() / static_cast<double>(len)) * v.middleRows(lo, len);
        if (cache) attn[i] = std::move(a);
    }
    if (cache) {
        cache->offsets = std::move(offsets);
        cache->q = std::move(q);
        cache->k = std::move(k);
        cache->v = std::move(v);
        cache->a = std::move(attn);
    }
    return pooled;
}

void encode_all_backward(const std::vector<TokenSeq>& seqs, const EncoderParams& params, const PackedAttention& cache,
                         const Matrix& d_pooled, EncoderGradients& grads) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(params.dim()));
    const Eigen::Index rows = cache.offsets.back();
    Matrix dq = Matrix::Zero(rows, params.dim());
    Matrix dk = Matrix::Zero(rows, params.dim());
    Matrix dv = Matrix::Zero(rows, params.dim());
    for (std::size_t i = 0; i < seqs.size(); ++i) {
        const auto row = d_pooled.row(static_cast<Eigen::Index>(i));
        if (row.isZero(0.0)) continue;
        const auto lo = cache.offsets[i];
        const auto len = cache.offsets[i + 1] - lo;
        const Matrix& a = cache.a[i];
        // Every row of dZ is g / len, so every row of dA is (V g)^T / len.
        const Vector g = row.transpose() / static_cast<double>(len);
        const Vector da = cache.v.middleRows(lo, len) * g;
        dv.middleRows(lo, len).noalias() += a.colwise().sum().transpose() * g.transpose();
        Matrix ds(len, len);
        for (Eigen::Index r = 0; r < len; ++r) {
            const double dot = a.row(r).dot(da.transpose());
            ds.row(r) = (a.row(r).array() * (da.transpose().array() - dot)).matrix();
        }
        ds *= scale;
        dq.middleRows(lo, len).noalias() += ds * cache.k.middleRows(lo, len);
        dk.middleRows(lo, len).noalias() += ds.transpose() * cache.q.middleRows(lo, len);
    }
    // Fold occurrence gradients onto vocabulary rows, then apply the
    // projections at vocabulary size.
    Matrix sq = Matrix::Zero(params.token_table.rows(), params.dim());
    Matrix sk = Matrix::Zero(params.token_table.rows(), params.dim());
    Matrix sv = Matrix::Zero(params.token_table.rows(), params.dim());
    for (std::size_t i = 0; i < seqs.size(); ++i) {
        for (std::size_t t = 0; t < seqs[i].ids.size(); ++t) {
            const auto r = cache.offsets[i] + static_cast<Eigen::Index>(t);
            const auto id = seqs[i].ids[t];
            sq.row(id) += dq.row(r);
            sk.row(id) += dk.row(r);
            sv.row(id) += dv.row(r);
        }
    }
    grads.w_q.noalias() += params.token_table.transpose() * sq;
    grads.w_k.noalias() += params.token_table.transpose() * sk;
    grads.w_v.noalias() += params.token_table.transpose() * sv;
    grads.token_table.noalias() += sq * params.w_q.transpose();
    grads.token_table.noalias() += sk * params.w_k.transpose();
    grads.token_table.noalias() += sv * params.w_v.transpose();
}

}  // namespace kgsr::text
