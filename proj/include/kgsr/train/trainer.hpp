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
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kgsr/io/config.hpp"
#include "kgsr/train/losses.hpp"

namespace kgsr::train {

struct TrainConfig {
    double learning_rate = 1e-3;
    int batch_size = 64;
    int epochs = 30;
    std::uint64_t seed = 42;
    LossWeights weights;
    std::optional<double> grad_clip;  // global L2 norm over all blocks
    double weight_decay = 0.0;        // decoupled (AdamW); 0 gives plain Adam
    int lr_decay_every = 10;
    double lr_decay_factor = 0.5;
    double margin = 1.0;
    model::ModelDims dims;

    /// Throws InvalidConfig.
    void validate() const;

    static const std::set<std::string>& known_keys();
    /// Reads the `train.*` and `model.*` keys present in `file`; missing
    /// keys keep their defaults.
    static TrainConfig from_config(const io::ConfigFile& file);
    /// Loads a file that may only contain trainer keys.
    static TrainConfig load(const std::string& path);
};

struct LossCurve {
    std::vector<double> train;
    std::vector<double> test;

    /// `epoch,train_loss,test_loss`, one row per epoch, round-trippable
    /// decimal formatting.
    std::string to_csv() const;
};

/// Supervision for train(). Click lists hold observed positives only;
/// negatives are sampled uniformly from the ads each user never clicked.
struct TrainData {
    const kg::KnowledgeGraph* graph = nullptr;
    const std::vector<text::TokenSeq>* tokens = nullptr;
    std::vector<ClickExample> train_clicks;
    std::vector<ClickExample> test_clicks;
};

struct TrainResult {
    model::Model model;
    LossCurve curve;
    double initial_train_loss = 0.0;
    double initial_test_loss = 0.0;
};

using EpochCallback = std::function<void(int epoch, double train_loss, double test_loss)>;

/// Minibatch Adam over the joint objective. Throws DivergedLoss when the
/// train loss turns NaN or exceeds 10x its initial value.
TrainResult train(const TrainConfig& config, const TrainData& data, const EpochCallback& on_epoch = {});

/// Per-block Adam moments with bias correction.
class AdamState {
public:
    explicit AdamState(const model::Model& like);
    void step(model::Model& params, const model::Model& grads, double learning_rate, double weight_decay);
    long steps() const { return t_; }

private:
    model::Model m_;
    model::Model v_;
    long t_ = 0;
};

/// Scales every block so the global L2 norm is at most max_norm; returns
/// the norm before clipping.
double clip_global_norm(model::Model& grads, double max_norm);

}  // namespace kgsr::train
