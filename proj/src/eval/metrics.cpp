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

#include "kgsr/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "kgsr/error.hpp"

namespace kgsr::eval {

namespace {

void check(const GroundTruth& truth, int k) {
    if (truth.empty()) throw Error(ErrorCode::EmptyTruth, "ground truth is empty");
    if (k < 1) throw Error(ErrorCode::InvalidConfig, "k must be >= 1");
}

bool relevant(const GroundTruth& truth, std::uint32_t id) { return std::binary_search(truth.begin(), truth.end(), id); }

}  // namespace

GroundTruth make_truth(std::vector<std::uint32_t> ids) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

std::size_t hits_at_k(std::span<const std::uint32_t> ranked, const GroundTruth& truth, int k) {
    check(truth, k);
    const auto n = std::min(ranked.size(), static_cast<std::size_t>(k));
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) hits += relevant(truth, ranked[i]);
    return hits;
}

double precision_at_k(std::span<const std::uint32_t> ranked, const GroundTruth& truth, int k) {
    return static_cast<double>(hits_at_k(ranked, truth, k)) / static_cast<double>(k);
}

double recall_at_k(std::span<const std::uint32_t> ranked, const GroundTruth& truth, int k) {
    return static_cast<double>(hits_at_k(ranked, truth, k)) / static_cast<double>(truth.size());
}

double ndcg_at_k(std::span<const std::uint32_t> ranked, const GroundTruth& truth, int k) {
    check(truth, k);
    const auto n = std::min(ranked.size(), static_cast<std::size_t>(k));
    double dcg = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (relevant(truth, ranked[i])) dcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
    double ideal = 0.0;
    const auto m = std::min(truth.size(), static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < m; ++i) ideal += 1.0 / std::log2(static_cast<double>(i) + 2.0);
    return dcg / ideal;
}

double reciprocal_rank(std::span<const std::uint32_t> ranked, const GroundTruth& truth) {
    if (truth.empty()) throw Error(ErrorCode::EmptyTruth, "ground truth is empty");
    for (std::size_t i = 0; i < ranked.size(); ++i)
        if (relevant(truth, ranked[i])) return 1.0 / static_cast<double>(i + 1);
    return 0.0;
}

double mrr(const std::vector<RankedList>& lists, const std::vector<GroundTruth>& truths) {
    if (lists.empty()) throw Error(ErrorCode::NoQueries, "MRR over zero queries");
    if (lists.size() != truths.size()) throw Error(ErrorCode::LengthMismatch, "lists and truths differ in length");
    double sum = 0.0;
    for (std::size_t i = 0; i < lists.size(); ++i) sum += reciprocal_rank(lists[i], truths[i]);
    return sum / static_cast<double>(lists.size());
}

MetricsReport aggregate(const std::vector<RankedList>& lists, const std::vector<GroundTruth>& truths, double arl_ms) {
    if (lists.empty()) throw Error(ErrorCode::NoQueries, "no queries to aggregate");
    if (lists.size() != truths.size()) throw Error(ErrorCode::LengthMismatch, "lists and truths differ in length");
    MetricsReport r;
    for (std::size_t i = 0; i < lists.size(); ++i) {
        r.precision_at_10 += precision_at_k(lists[i], truths[i], 10);
        r.precision_at_20 += precision_at_k(lists[i], truths[i], 20);
        r.recall_at_10 += recall_at_k(lists[i], truths[i], 10);
        r.recall_at_20 += recall_at_k(lists[i], truths[i], 20);
        r.ndcg_at_10 += ndcg_at_k(lists[i], truths[i], 10);
        r.ndcg_at_20 += ndcg_at_k(lists[i], truths[i], 20);
    }
    const double n = static_cast<double>(lists.size());
    r.precision_at_10 /= n;
    r.precision_at_20 /= n;
    r.recall_at_10 /= n;
    r.recall_at_20 /= n;
    r.ndcg_at_10 /= n;
    r.ndcg_at_20 /= n;
    r.mrr = mrr(lists, truths);
    r.arl_ms = arl_ms;
    r.users = lists.size();
    return r;
}

namespace {

nlohmann::ordered_json ranking_json(const MetricsReport& r) {
    return {{"precision@10", r.precision_at_10}, {"precision@20", r.precision_at_20},
            {"recall@10", r.recall_at_10},       {"recall@20", r.recall_at_20},
            {"ndcg@10", r.ndcg_at_10},           {"ndcg@20", r.ndcg_at_20},
            {"mrr", r.mrr},                      {"users", r.users}};
}

}  // namespace

std::string MetricsReport::to_json_line() const {
    auto j = ranking_json(*this);
    j["arl_ms"] = arl_ms;
    return j.dump();
}

std::string MetricsReport::ranking_fingerprint() const { return ranking_json(*this).dump(); }

std::string metrics_table(const std::vector<std::pair<std::string, MetricsReport>>& rows) {
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-20s %8s %8s %8s %8s %8s %8s %8s %9s\n", "ranker", "P@10", "P@20", "R@10", "R@20",
                  "NDCG@10", "NDCG@20", "MRR", "ARL(ms)");
    out += buf;
    for (const auto& [name, r] : rows) {
        std::snprintf(buf, sizeof buf, "%-20s %8.4f %8.4f %8.4f %8.4f %8.4f %8.4f %8.4f %9.3f\n", name.c_str(),
                      r.precision_at_10, r.precision_at_20, r.recall_at_10, r.recall_at_20, r.ndcg_at_10,
                      r.ndcg_at_20, r.mrr, r.arl_ms);
        out += buf;
    }
    return out;
}

}  // namespace kgsr::eval
