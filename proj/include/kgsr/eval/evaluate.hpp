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

#include <functional>
#include <vector>

#include "kgsr/eval/metrics.hpp"
#include "kgsr/index/latency.hpp"
#include "kgsr/index/vector_index.hpp"
#include "kgsr/model/model.hpp"

namespace kgsr::eval {

/// One held-out user: the ads they clicked, and the ads they interacted
/// with in training (never recommended back). Both sorted.
struct TestQuery {
    EntityId user;
    GroundTruth truth;
    std::vector<std::uint32_t> exclude;
};

/// Returns up to `limit` ads for a query, best first.
using Ranker = std::function<RankedList(const TestQuery&, std::size_t limit)>;

/// Candidates for a query in ascending id order: `ads` minus exclusions.
std::vector<std::uint32_t> candidates(std::span<const std::uint32_t> ads, const TestQuery& q);

/// Seeded shuffle of each query's candidates; one stream for all queries,
/// consumed in query order.
Ranker random_ranker(std::vector<std::uint32_t> ads, std::uint64_t seed);

/// Ads by descending click count (label 1 only), ties by ascending id.
/// Ads without clicks follow in id order.
std::vector<std::uint32_t> popularity_order(const std::vector<kg::InteractionRecord>& train,
                                            std::span<const std::uint32_t> ads);
Ranker popularity_ranker(std::vector<std::uint32_t> order);

/// Ranks candidates by a per-(user, ad) score, descending, ties by id.
Ranker score_ranker(std::vector<std::uint32_t> ads, std::function<double(EntityId user, std::uint32_t ad)> score);

/// Metrics for a ranker over all queries. ARL is the mean wall time per
/// query in milliseconds.
MetricsReport evaluate_ranker(const std::vector<TestQuery>& queries, const Ranker& ranker, std::size_t limit,
                              std::vector<RankedList>* lists = nullptr);

struct EvalConfig {
    int retrieve_k = 100;
    index::SearchParams search;
    double latency_threshold_ms = 50.0;
};

struct ModelEvaluation {
    MetricsReport raw;       // index order by fused-vector distance
    MetricsReport reranked;  // same candidates ordered by the bilinear score
    index::LatencyReport latency;  // of the full lookup + search + rerank path
    std::vector<RankedList> raw_lists;
    std::vector<RankedList> reranked_lists;
};

/// Retrieves `retrieve_k` ads per test user from `index` with the user's
/// fused vector, then reranks them by the bilinear score of final GAT
/// states computed on `graph` (the training graph).
ModelEvaluation evaluate_model(const model::Model& m, const kg::KnowledgeGraph& graph,
                               const std::vector<text::TokenSeq>& tokens, const index::VectorIndex& index,
                               const std::vector<TestQuery>& queries, const EvalConfig& config);

}  // namespace kgsr::eval
