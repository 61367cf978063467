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

#include "kgsr/kg/graph_io.hpp"

namespace kgsr::eval {

struct SplitRatios {
    double train = 0.70;
    double valid = 0.15;
    double test = 0.15;
};

struct UserSplit {
    std::vector<std::string> train_users;
    std::vector<std::string> valid_users;
    std::vector<std::string> test_users;
    std::vector<kg::RawInteraction> train;
    std::vector<kg::RawInteraction> valid;
    std::vector<kg::RawInteraction> test;
};

/// Shuffles the distinct users with `seed` and slices them: floor(n *
/// train) users for train, floor(n * valid) for valid, the rest for test.
/// Interactions follow their user and keep their input order. Throws
/// TooFewUsers (< 3) and InvalidConfig when the ratios do not sum to 1.
UserSplit split_by_user(const std::vector<kg::RawInteraction>& interactions, const SplitRatios& ratios,
                        std::uint64_t seed);

/// Users found in more than one split, or interactions filed under a
/// split their user does not belong to. Empty for a clean split.
std::vector<std::string> leaked_users(const UserSplit& split);

/// Throws InvalidConfig if any Clicks edge of `graph` starts at a user
/// outside `train_users`.
void audit_graph_leakage(const kg::KnowledgeGraph& graph, const std::vector<std::string>& train_users);

}  // namespace kgsr::eval
