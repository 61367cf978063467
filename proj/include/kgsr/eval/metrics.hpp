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
#include <span>
#include <string>
#include <vector>

namespace kgsr::eval {

/// Ranked ad ids for one query, best first, no duplicates.
using RankedList = std::vector<std::uint32_t>;
/// Relevant ad ids for one query, kept sorted for lookups.
using GroundTruth = std::vector<std::uint32_t>;

GroundTruth make_truth(std::vector<std::uint32_t> ids);

// Each of these throws EmptyTruth for an empty truth set and InvalidConfig
// for k < 1. Lists shorter than k count the missing slots as misses.
std::size_t hits_at_k(std::span<const std::uint32_t> ranked, const GroundTruth& truth, int k);
double precision_at_k(std::span<const std::uint32_t> ranked, const GroundTruth& truth, int k);
double recall_at_k(std::span<const std::uint32_t> ranked, const GroundTruth& truth, int k);
/// Binary relevance, log2(rank + 1) discount, normalized by the ideal DCG
/// for min(k, |truth|) relevant items.
double ndcg_at_k(std::span<const std::uint32_t> ranked, const GroundTruth& truth, int k);
/// 1 / rank of the first relevant item, 0 if none appears.
double reciprocal_rank(std::span<const std::uint32_t> ranked, const GroundTruth& truth);
/// Throws NoQueries or LengthMismatch.
double mrr(const std::vector<RankedList>& lists, const std::vector<GroundTruth>& truths);

struct MetricsReport {
    double precision_at_10 = 0.0;
    double precision_at_20 = 0.0;
    double recall_at_10 = 0.0;
    double recall_at_20 = 0.0;
    double ndcg_at_10 = 0.0;
    double ndcg_at_20 = 0.0;
    double mrr = 0.0;
    double arl_ms = 0.0;
    std::size_t users = 0;

    /// One JSON object on a single line.
    std::string to_json_line() const;
    /// Same fields but without the wall-clock latency, for comparing runs.
    std::string ranking_fingerprint() const;
};

/// Means over queries, summed in query order. Throws NoQueries,
/// LengthMismatch.
MetricsReport aggregate(const std::vector<RankedList>& lists, const std::vector<GroundTruth>& truths, double arl_ms);

/// Fixed-width text table, one row per named report.
std::string metrics_table(const std::vector<std::pair<std::string, MetricsReport>>& rows);

}  // namespace kgsr::eval
