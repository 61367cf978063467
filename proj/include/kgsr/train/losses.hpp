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

#include <span>
#include <vector>

#include "kgsr/embed/transe.hpp"
#include "kgsr/model/model.hpp"

namespace kgsr::train {

inline constexpr double kProbabilityClamp = 1e-7;

struct LossWeights {
    double rec = 1.0;    // lambda1, click cross-entropy
    double kg = 0.5;     // lambda2, margin loss
    double align = 0.1;  // lambda3, semantic/KG alignment

    /// Throws InvalidConfig for negative or all-zero weights.
    void validate() const;
};

/// Mean binary cross-entropy with predictions clamped to [1e-7, 1 - 1e-7].
/// Throws EmptyBatch / LengthMismatch.
double bce_loss(std::span<const double> predictions, std::span<const int> labels);

/// Mean over pairs of ||h_kg - P e_sem||^2. Throws LengthMismatch.
double align_loss(const std::vector<Vector>& kg_rows, const std::vector<Vector>& sem_rows, const Matrix& projector);

double total_loss(double rec, double kg, double align, const LossWeights& weights);

struct ClickExample {
    EntityId user;
    EntityId ad;
    int label;
};

/// One optimization step's worth of supervision.
struct Batch {
    std::vector<ClickExample> clicks;
    std::vector<embed::NegativePair> kg_pairs;
    std::vector<EntityId> align_entities;
};

struct LossBreakdown {
    double rec = 0.0;
    double kg = 0.0;
    double align = 0.0;
    double total = 0.0;
};

struct ObjectiveContext {
    const kg::KnowledgeGraph* graph = nullptr;
    const std::vector<text::TokenSeq>* tokens = nullptr;
    LossWeights weights;
    double margin = 1.0;
};

/// Evaluates the joint objective on `batch`: rec and align are means over
/// their examples, kg the mean hinge over the batch's negative pairs. When
/// `grads` is non-null it receives the exact reverse-mode gradient (added
/// to whatever it holds).
LossBreakdown objective(const model::Model& m, const ObjectiveContext& ctx, const Batch& batch,
                        model::Model* grads);

/// Zero-initialized gradients of the objective. Throws NonFiniteGradient
/// naming the first block with a NaN or Inf.
model::Model compute_gradients(const model::Model& m, const ObjectiveContext& ctx, const Batch& batch,
                               LossBreakdown* loss = nullptr);

}  // namespace kgsr::train
