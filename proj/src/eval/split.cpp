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

#include "kgsr/eval/split.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_set>

#include "kgsr/error.hpp"

namespace kgsr::eval {

UserSplit split_by_user(const std::vector<kg::RawInteraction>& interactions, const SplitRatios& ratios,
                        std::uint64_t seed) {
    if (ratios.train < 0.0 || ratios.valid < 0.0 || ratios.test < 0.0 ||
        std::abs(ratios.train + ratios.valid + ratios.test - 1.0) > 1e-9)
        throw Error(ErrorCode::InvalidConfig, "split ratios must be non-negative and sum to 1");

    std::set<std::string> distinct;
    for (const auto& r : interactions) distinct.insert(r.user);
    if (distinct.size() < 3)
        throw Error(ErrorCode::TooFewUsers, "need at least 3 users to split, got " + std::to_string(distinct.size()));

    std::vector<std::string> users(distinct.begin(), distinct.end());
    Rng rng(seed);
    std::shuffle(users.begin(), users.end(), rng);

    const double n = static_cast<double>(users.size());
    // The epsilon absorbs products like 0.7 * 10 landing just below 7.
    const auto n_train = static_cast<std::size_t>(std::floor(n * ratios.train + 1e-9));
    const auto n_valid = static_cast<std::size_t>(std::floor(n * ratios.valid + 1e-9));

    UserSplit s;
    s.train_users.assign(users.begin(), users.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.valid_users.assign(users.begin() + static_cast<std::ptrdiff_t>(n_train),
                         users.begin() + static_cast<std::ptrdiff_t>(n_train + n_valid));
    s.test_users.assign(users.begin() + static_cast<std::ptrdiff_t>(n_train + n_valid), users.end());

    std::map<std::string, int> part;
    for (const auto& u : s.train_users) part[u] = 0;
    for (const auto& u : s.valid_users) part[u] = 1;
    for (const auto& u : s.test_users) part[u] = 2;
    for (const auto& r : interactions) {
        switch (part.at(r.user)) {
            case 0: s.train.push_back(r); break;
            case 1: s.valid.push_back(r); break;
            default: s.test.push_back(r); break;
        }
    }
    return s;
}

std::vector<std::string> leaked_users(const UserSplit& split) {
    std::map<std::string, int> membership;
    std::set<std::string> leaked;
    const std::vector<std::string>* lists[] = {&split.train_users, &split.valid_users, &split.test_users};
    for (int p = 0; p < 3; ++p) {
        for (const auto& u : *lists[p]) {
            auto [it, fresh] = membership.emplace(u, p);
            if (!fresh && it->second != p) leaked.insert(u);
        }
    }
    const std::vector<kg::RawInteraction>* rows[] = {&split.train, &split.valid, &split.test};
    for (int p = 0; p < 3; ++p) {
        for (const auto& r : *rows[p]) {
            auto it = membership.find(r.user);
            if (it == membership.end() || it->second != p) leaked.insert(r.user);
        }
    }
    return {leaked.begin(), leaked.end()};
}

void audit_graph_leakage(const kg::KnowledgeGraph& graph, const std::vector<std::string>& train_users) {
    std::unordered_set<std::string> allowed(train_users.begin(), train_users.end());
    for (const auto& t : graph.triples()) {
        if (t.relation != kg::RelationKind::Clicks) continue;
        const auto& user = graph.entity(t.head).id;
        if (!allowed.count(user))
            throw Error(ErrorCode::InvalidConfig, "leakage: click edge from non-train user " + user);
    }
}

}  // namespace kgsr::eval
