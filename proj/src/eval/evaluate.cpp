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

#include "kgsr/eval/evaluate.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <memory>

#include "kgsr/error.hpp"

namespace kgsr::eval {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_us(Clock::time_point a, Clock::time_point b) {
    return static_cast<double>(std::chrono::duration_cast<std::chrono::microseconds>(b - a).count());
}

bool excluded(const TestQuery& q, std::uint32_t ad) { return std::binary_search(q.exclude.begin(), q.exclude.end(), ad); }

}  // namespace

std::vector<std::uint32_t> candidates(std::span<const std::uint32_t> ads, const TestQuery& q) {
    std::vector<std::uint32_t> out;
    out.reserve(ads.size());
    for (auto a : ads)
        if (!excluded(q, a)) out.push_back(a);
    std::sort(out.begin(), out.end());
    return out;
}

Ranker random_ranker(std::vector<std::uint32_t> ads, std::uint64_t seed) {
    auto rng = std::make_shared<Rng>(seed);
    return [ads = std::move(ads), rng](const TestQuery& q, std::size_t limit) {
        auto c = candidates(ads, q);
        std::shuffle(c.begin(), c.end(), *rng);
        if (c.size() > limit) c.resize(limit);
        return c;
    };
}

std::vector<std::uint32_t> popularity_order(const std::vector<kg::InteractionRecord>& train,
                                            std::span<const std::uint32_t> ads) {
    std::map<std::uint32_t, std::size_t> count;
    for (auto a : ads) count[a] = 0;
    for (const auto& r : train)
        if (r.label == 1) {
            if (auto it = count.find(r.ad); it != count.end()) ++it->second;
        }
    std::vector<std::pair<std::size_t, std::uint32_t>> keyed;
    for (const auto& [ad, c] : count) keyed.push_back({c, ad});
    std::stable_sort(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
    std::vector<std::uint32_t> order;
    for (const auto& k : keyed) order.push_back(k.second);
    return order;
}

Ranker popularity_ranker(std::vector<std::uint32_t> order) {
    return [order = std::move(order)](const TestQuery& q, std::size_t limit) {
        RankedList out;
        for (auto a : order) {
            if (out.size() >= limit) break;
            if (!excluded(q, a)) out.push_back(a);
        }
        return out;
    };
}

Ranker score_ranker(std::vector<std::uint32_t> ads, std::function<double(EntityId, std::uint32_t)> score) {
    return [ads = std::move(ads), score = std::move(score)](const TestQuery& q, std::size_t limit) {
        std::vector<std::pair<double, std::uint32_t>> keyed;
        for (auto a : candidates(ads, q)) keyed.push_back({score(q.user, a), a});
        const auto n = std::min(limit, keyed.size());
        std::partial_sort(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(n), keyed.end(),
                          [](const auto& x, const auto& y) { return x.first > y.first || (x.first == y.first && x.second < y.second); });
        RankedList out;
        for (std::size_t i = 0; i < n; ++i) out.push_back(keyed[i].second);
        return out;
    };
}

MetricsReport evaluate_ranker(const std::vector<TestQuery>& queries, const Ranker& ranker, std::size_t limit,
                              std::vector<RankedList>* lists) {
    if (queries.empty()) throw Error(ErrorCode::NoQueries, "no test queries");
    std::vector<RankedList> ranked;
    std::vector<GroundTruth> truths;
    double total_us = 0.0;
    for (const auto& q : queries) {
        const auto t0 = Clock::now();
        ranked.push_back(ranker(q, limit));
        total_us += elapsed_us(t0, Clock::now());
        truths.push_back(q.truth);
    }
    auto report = aggregate(ranked, truths, total_us / 1000.0 / static_cast<double>(queries.size()));
    if (lists) *lists = std::move(ranked);
    return report;
}

ModelEvaluation evaluate_model(const model::Model& m, const kg::KnowledgeGraph& graph,
                               const std::vector<text::TokenSeq>& tokens, const index::VectorIndex& index,
                               const std::vector<TestQuery>& queries, const EvalConfig& config) {
    if (queries.empty()) throw Error(ErrorCode::NoQueries, "no test queries");
    if (config.retrieve_k < 1) throw Error(ErrorCode::InvalidConfig, "retrieve_k must be >= 1");
    const auto pass = model::forward(m, graph, tokens, true);
    const Matrix& fused = pass.fused;
    const Matrix& states = pass.final_states;
    if (index.store().dim() != fused.cols())
        throw Error(ErrorCode::DimensionMismatch, "index dimension does not match the model's fused vectors");

    ModelEvaluation out;
    index::LatencyMonitor raw_clock(config.latency_threshold_ms * 1000.0);
    index::LatencyMonitor full_clock(config.latency_threshold_ms * 1000.0);
    std::vector<GroundTruth> truths;
    std::vector<double> query(static_cast<std::size_t>(fused.cols()));

    for (const auto& q : queries) {
        const auto t0 = Clock::now();
        for (Eigen::Index c = 0; c < fused.cols(); ++c) query[c] = fused(q.user, c);
        const int fetch = config.retrieve_k + static_cast<int>(q.exclude.size());
        const auto hits = index.search(query, fetch, config.search);
        RankedList raw;
        for (const auto& h : hits) {
            if (static_cast<int>(raw.size()) >= config.retrieve_k) break;
            if (!excluded(q, h.id)) raw.push_back(h.id);
        }
        const auto t1 = Clock::now();

        const RowVector wu = states.row(q.user) * m.bilinear.w;
        std::vector<std::pair<double, std::uint32_t>> scored;
        scored.reserve(raw.size());
        for (auto ad : raw) scored.push_back({wu.dot(states.row(ad)), ad});
        std::sort(scored.begin(), scored.end(),
                  [](const auto& x, const auto& y) { return x.first > y.first || (x.first == y.first && x.second < y.second); });
        RankedList reranked;
        reranked.reserve(scored.size());
        for (const auto& s : scored) reranked.push_back(s.second);
        const auto t2 = Clock::now();

        raw_clock.record(t1 - t0);
        full_clock.record(t2 - t0);
        out.raw_lists.push_back(std::move(raw));
        out.reranked_lists.push_back(std::move(reranked));
        truths.push_back(q.truth);
    }
    out.latency = full_clock.report();
    out.raw = aggregate(out.raw_lists, truths, raw_clock.report().avg_us / 1000.0);
    out.reranked = aggregate(out.reranked_lists, truths, out.latency.avg_us / 1000.0);
    return out;
}

}  // namespace kgsr::eval
