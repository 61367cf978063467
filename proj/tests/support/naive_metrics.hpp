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

// Second, deliberately plain implementation of the ranking metrics: linear
// scans over std::set, no shared helpers with the library.

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

namespace kgsr::testing {

struct NaiveMetrics {
    double precision = 0;
    double recall = 0;
    double ndcg = 0;
    double rr = 0;
};

inline NaiveMetrics naive_metrics(const std::vector<std::uint32_t>& ranked, const std::vector<std::uint32_t>& truth,
                                  int k) {
    const std::set<std::uint32_t> rel(truth.begin(), truth.end());
    NaiveMetrics m;
    int hits = 0;
    double dcg = 0;
    for (int i = 0; i < k && i < static_cast<int>(ranked.size()); ++i) {
        if (rel.count(ranked[static_cast<std::size_t>(i)])) {
            ++hits;
            dcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
        }
    }
    double idcg = 0;
    const int ideal = std::min<int>(k, static_cast<int>(rel.size()));
    for (int i = 0; i < ideal; ++i) idcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
    m.precision = static_cast<double>(hits) / k;
    m.recall = static_cast<double>(hits) / static_cast<double>(rel.size());
    m.ndcg = dcg / idcg;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        if (rel.count(ranked[i])) {
            m.rr = 1.0 / static_cast<double>(i + 1);
            break;
        }
    }
    return m;
}

}  // namespace kgsr::testing
