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

#include "kgsr/train/losses.hpp"

#include <algorithm>
#include <cmath>

#include "kgsr/error.hpp"

namespace kgsr::train {

void LossWeights::validate() const {
    if (rec < 0.0 || kg < 0.0 || align < 0.0) throw Error(ErrorCode::InvalidConfig, "loss weights must be non-negative");
    if (rec == 0.0 && kg == 0.0 && align == 0.0) throw Error(ErrorCode::InvalidConfig, "loss weights are all zero");
}

double bce_loss(std::span<const double> predictions, std::span<const int> labels) {
    if (predictions.size() != labels.size()) {
        throw Error(ErrorCode::LengthMismatch, std::to_string(predictions.size()) + " predictions vs " +
                                                   std::to_string(labels.size()) + " labels");
    }
    if (predictions.empty()) throw Error(ErrorCode::EmptyBatch, "cross-entropy over an empty batch");
    double sum = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double p = std::clamp(predictions[i], kProbabilityClamp, 1.0 - kProbabilityClamp);
        sum -= labels[i] ? std::log(p) : std::log(1.0 - p);
    }
    return sum / static_cast<double>(predictions.size());
}

double align_loss(const std::vector<Vector>& kg_rows, const std::vector<Vector>& sem_rows, const Matrix& projector) {
    if (kg_rows.size() != sem_rows.size()) throw Error(ErrorCode::LengthMismatch, "alignment pairs differ in length");
    if (kg_rows.empty()) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < kg_rows.size(); ++i) sum += (kg_rows[i] - projector * sem_rows[i]).squaredNorm();
    return sum / static_cast<double>(kg_rows.size());
}

double total_loss(double rec, double kg, double align, const LossWeights& weights) {
    return weights.rec * rec + weights.kg * kg + weights.align * align;
}

}  // namespace kgsr::train
