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
#include <functional>
#include <string>
#include <vector>

#include "kgsr/model/model.hpp"
#include "kgsr/train/losses.hpp"

namespace kgsr::train {

struct GradCheckOptions {
    double epsilon = 1e-5;
    double tolerance = 1e-4;
    /// Coordinates where both analytic and numeric magnitudes fall below
    /// this are not compared.
    double min_magnitude = 1e-8;
    /// Cap on coordinates per block (0 = all), picked with a fixed stride.
    std::size_t max_coords_per_block = 0;
};

struct BlockCheck {
    std::string name;
    double max_rel_error = 0.0;
    std::size_t checked = 0;
    std::size_t skipped_small = 0;
    std::size_t skipped_kink = 0;
};

struct GradCheckReport {
    std::vector<BlockCheck> blocks;
    double max_rel_error = 0.0;
    bool passed = true;
};

/// Compares `analytic` against central differences of `loss` around `m`.
/// Coordinates whose one-sided differences disagree sharply sit on a
/// non-differentiable point (hinge, clamp, LeakyReLU) and are skipped.
GradCheckReport finite_difference_check(const model::Model& m, const model::Model& analytic,
                                        const std::function<long double(const model::Model&)>& loss,
                                        const GradCheckOptions& options = {});

/// A randomized tiny problem: at most 10 entities, 16 interactions, every
/// width 4. Used by the gradcheck command and the acceptance suite.
struct TinyProblem {
    kg::KnowledgeGraph graph;
    std::vector<text::TokenSeq> tokens;
    model::Model model;
    Batch batch;
    ObjectiveContext context() const;
    LossWeights weights;
};

TinyProblem make_tiny_problem(std::uint64_t seed);

GradCheckReport check_tiny_problem(std::uint64_t seed, const GradCheckOptions& options = {});

}  // namespace kgsr::train
