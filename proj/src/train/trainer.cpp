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

#include "kgsr/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_set>

#include "kgsr/error.hpp"

namespace kgsr::train {

void TrainConfig::validate() const {
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
        throw Error(ErrorCode::InvalidConfig, "learning_rate must be finite and non-negative");
    if (epochs < 1) throw Error(ErrorCode::InvalidConfig, "epochs must be >= 1");
    if (batch_size < 1) throw Error(ErrorCode::InvalidConfig, "batch_size must be >= 1");
    if (grad_clip && !(*grad_clip > 0.0)) throw Error(ErrorCode::InvalidConfig, "grad_clip must be positive");
    if (weight_decay < 0.0) throw Error(ErrorCode::InvalidConfig, "weight_decay must be non-negative");
    if (lr_decay_every < 1) throw Error(ErrorCode::InvalidConfig, "lr_decay_every must be >= 1");
    if (!(lr_decay_factor > 0.0 && lr_decay_factor <= 1.0))
        throw Error(ErrorCode::InvalidConfig, "lr_decay_factor must be in (0, 1]");
    if (!(margin > 0.0)) throw Error(ErrorCode::InvalidConfig, "margin must be positive");
    if (dims.kg_dim < 1 || dims.sem_dim < 1 || dims.hidden_dim < 1 || dims.gat_layers < 1 || dims.vocab_size < 1)
        throw Error(ErrorCode::InvalidConfig, "model dimensions must be positive");
    weights.validate();
}

const std::set<std::string>& TrainConfig::known_keys() {
    static const std::set<std::string> keys = {
        "train.learning_rate",  "train.batch_size",      "train.epochs",       "train.seed",
        "train.lambda_rec",     "train.lambda_kg",       "train.lambda_align", "train.grad_clip",
        "train.weight_decay",   "train.lr_decay_every",  "train.lr_decay_factor", "train.margin",
        "model.kg_dim",         "model.sem_dim",         "model.hidden_dim",   "model.vocab_size",
        "model.gat_layers",
    };
    return keys;
}

TrainConfig TrainConfig::from_config(const io::ConfigFile& f) {
    TrainConfig c;
    c.learning_rate = f.get_double("train.learning_rate", c.learning_rate);
    c.batch_size = static_cast<int>(f.get_int("train.batch_size", c.batch_size));
    c.epochs = static_cast<int>(f.get_int("train.epochs", c.epochs));
    c.seed = static_cast<std::uint64_t>(f.get_int("train.seed", static_cast<std::int64_t>(c.seed)));
    c.weights.rec = f.get_double("train.lambda_rec", c.weights.rec);
    c.weights.kg = f.get_double("train.lambda_kg", c.weights.kg);
    c.weights.align = f.get_double("train.lambda_align", c.weights.align);
    if (f.has("train.grad_clip")) {
        const std::string v = f.get_string("train.grad_clip", "none");
        if (v == "none") {
            c.grad_clip.reset();
        } else {
            c.grad_clip = f.get_double("train.grad_clip", 0.0);
        }
    }
    c.weight_decay = f.get_double("train.weight_decay", c.weight_decay);
    c.lr_decay_every = static_cast<int>(f.get_int("train.lr_decay_every", c.lr_decay_every));
    c.lr_decay_factor = f.get_double("train.lr_decay_factor", c.lr_decay_factor);
    c.margin = f.get_double("train.margin", c.margin);
    c.dims.kg_dim = static_cast<int>(f.get_int("model.kg_dim", c.dims.kg_dim));
    c.dims.sem_dim = static_cast<int>(f.get_int("model.sem_dim", c.dims.sem_dim));
    c.dims.hidden_dim = static_cast<int>(f.get_int("model.hidden_dim", c.dims.hidden_dim));
    c.dims.vocab_size = static_cast<std::uint32_t>(f.get_int("model.vocab_size", c.dims.vocab_size));
    c.dims.gat_layers = static_cast<int>(f.get_int("model.gat_layers", c.dims.gat_layers));
    c.validate();
    return c;
}

TrainConfig TrainConfig::load(const std::string& path) {
    const auto f = io::ConfigFile::load(path);
    f.check_known(known_keys());
    return from_config(f);
}

std::string LossCurve::to_csv() const {
    std::string out = "epoch,train_loss,test_loss\n";
    char buf[96];
    for (std::size_t i = 0; i < train.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i + 1, train[i], test[i]);
        out += buf;
    }
    return out;
}

AdamState::AdamState(const model::Model& like) : m_(like.zeros_like()), v_(like.zeros_like()) {}

void AdamState::step(model::Model& params, const model::Model& grads, double learning_rate, double weight_decay) {
    constexpr double beta1 = 0.9;
    constexpr double beta2 = 0.999;
    constexpr double eps = 1e-8;
    ++t_;
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t_));

    std::vector<Matrix*> p, m, v;
    std::vector<const Matrix*> g;
    model::visit_blocks(params, [&](const std::string&, Matrix& b) { p.push_back(&b); });
    model::visit_blocks(m_, [&](const std::string&, Matrix& b) { m.push_back(&b); });
    model::visit_blocks(v_, [&](const std::string&, Matrix& b) { v.push_back(&b); });
    model::visit_blocks(grads, [&](const std::string&, const Matrix& b) { g.push_back(&b); });

    for (std::size_t i = 0; i < p.size(); ++i) {
        const auto n = p[i]->size();
        double* pd = p[i]->data();
        double* md = m[i]->data();
        double* vd = v[i]->data();
        const double* gd = g[i]->data();
        for (Eigen::Index j = 0; j < n; ++j) {
            md[j] = beta1 * md[j] + (1.0 - beta1) * gd[j];
            vd[j] = beta2 * vd[j] + (1.0 - beta2) * gd[j] * gd[j];
            const double update = (md[j] / c1) / (std::sqrt(vd[j] / c2) + eps);
            pd[j] -= learning_rate * (update + weight_decay * pd[j]);
        }
    }
}

double clip_global_norm(model::Model& grads, double max_norm) {
    double sq = 0.0;
    model::visit_blocks(grads, [&](const std::string&, const Matrix& b) { sq += b.squaredNorm(); });
    const double norm = std::sqrt(sq);
    if (norm > max_norm) {
        const double s = max_norm / norm;
        model::visit_blocks(grads, [&](const std::string&, Matrix& b) { b *= s; });
    }
    return norm;
}

namespace {

// Ads clicked per user, for rejection of sampled negatives.
class NegativeSampler {
public:
    NegativeSampler(const kg::KnowledgeGraph& graph, const std::vector<ClickExample>& a,
                    const std::vector<ClickExample>& b) {
        const auto ads = graph.entities_of_kind(kg::EntityKind::Ad);
        ads_.assign(ads.begin(), ads.end());
        for (const auto* list : {&a, &b})
            for (const auto& c : *list) clicked_.insert(key(c.user, c.ad));
        if (ads_.empty()) throw Error(ErrorCode::EmptyBatch, "graph has no ads to sample negatives from");
    }

    /// One uniformly drawn ad the user never clicked. Falls back to a
    /// linear scan when rejection keeps hitting clicked ads.
    EntityId draw(EntityId user, Rng& rng) const {
        std::uniform_int_distribution<std::size_t> pick(0, ads_.size() - 1);
        for (int attempt = 0; attempt < 64; ++attempt) {
            const EntityId ad = ads_[pick(rng)];
            if (!clicked_.count(key(user, ad))) return ad;
        }
        std::vector<EntityId> free;
        for (EntityId ad : ads_)
            if (!clicked_.count(key(user, ad))) free.push_back(ad);
        if (free.empty()) throw Error(ErrorCode::NoNegativeAvailable, "user clicked every ad");
        return free[std::uniform_int_distribution<std::size_t>(0, free.size() - 1)(rng)];
    }

private:
    static std::uint64_t key(EntityId u, EntityId a) { return (static_cast<std::uint64_t>(u) << 32) | a; }
    std::vector<EntityId> ads_;
    std::unordered_set<std::uint64_t> clicked_;
};

std::vector<ClickExample> with_negatives(const std::vector<ClickExample>& positives, const NegativeSampler& sampler,
                                         Rng& rng) {
    std::vector<ClickExample> out;
    out.reserve(positives.size() * 2);
    for (const auto& c : positives) {
        out.push_back({c.user, c.ad, 1});
        out.push_back({c.user, sampler.draw(c.user, rng), 0});
    }
    return out;
}

std::vector<embed::NegativePair> corrupt_all(const kg::KnowledgeGraph& graph, Rng& rng) {
    std::vector<embed::NegativePair> pairs;
    pairs.reserve(graph.triple_count());
    for (const auto& t : graph.triples()) {
        try {
            pairs.push_back({t, kg::sample_negative(graph, t, rng)});
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NoNegativeAvailable) throw;
        }
    }
    return pairs;
}

std::vector<EntityId> all_entities(std::size_t n) {
    std::vector<EntityId> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<EntityId>(i);
    return ids;
}

void check_clicks(const kg::KnowledgeGraph& graph, const std::vector<ClickExample>& clicks, const char* what) {
    for (const auto& c : clicks) {
        if (c.user >= graph.entity_count() || c.ad >= graph.entity_count() ||
            graph.entity(c.user).kind != kg::EntityKind::User || graph.entity(c.ad).kind != kg::EntityKind::Ad) {
            throw Error(ErrorCode::UnknownEntity, std::string(what) + " click does not join a user to an ad");
        }
    }
}

}  // namespace

TrainResult train(const TrainConfig& config, const TrainData& data, const EpochCallback& on_epoch) {
    config.validate();
    if (!data.graph || !data.tokens) throw Error(ErrorCode::InvalidConfig, "train data is missing graph or tokens");
    const auto& graph = *data.graph;
    if (data.tokens->size() != graph.entity_count())
        throw Error(ErrorCode::LengthMismatch, "need one token sequence per entity");
    if (data.train_clicks.empty()) throw Error(ErrorCode::EmptyBatch, "no training clicks");
    if (data.test_clicks.empty()) throw Error(ErrorCode::EmptyBatch, "no held-out clicks");
    check_clicks(graph, data.train_clicks, "train");
    check_clicks(graph, data.test_clicks, "test");

    Rng rng(config.seed);
    TrainResult result;
    result.model = model::Model::init(config.dims, graph.entity_count(), rng);
    auto& m = result.model;

    const ObjectiveContext ctx{data.graph, data.tokens, config.weights, config.margin};
    const NegativeSampler sampler(graph, data.train_clicks, data.test_clicks);

    // Fixed evaluation batches, drawn from their own stream so they do not
    // depend on how many training draws happen.
    Rng eval_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
    const auto entities = all_entities(graph.entity_count());
    Batch train_eval{with_negatives(data.train_clicks, sampler, eval_rng), corrupt_all(graph, eval_rng), entities};
    Batch test_eval{with_negatives(data.test_clicks, sampler, eval_rng), train_eval.kg_pairs, entities};

    auto evaluate = [&](double& train_loss, double& test_loss) {
        train_loss = objective(m, ctx, train_eval, nullptr).total;
        test_loss = objective(m, ctx, test_eval, nullptr).total;
    };

    evaluate(result.initial_train_loss, result.initial_test_loss);
    const double initial = result.initial_train_loss;

    AdamState adam(m);
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        const double lr =
            config.learning_rate * std::pow(config.lr_decay_factor, static_cast<double>((epoch - 1) / config.lr_decay_every));

        auto clicks = with_negatives(data.train_clicks, sampler, rng);
        std::shuffle(clicks.begin(), clicks.end(), rng);
        auto pairs = corrupt_all(graph, rng);
        std::shuffle(pairs.begin(), pairs.end(), rng);

        const std::size_t bs = static_cast<std::size_t>(config.batch_size);
        const std::size_t n_batches = (clicks.size() + bs - 1) / bs;
        for (std::size_t b = 0; b < n_batches; ++b) {
            Batch batch;
            const std::size_t c0 = b * bs;
            const std::size_t c1 = std::min(clicks.size(), c0 + bs);
            batch.clicks.assign(clicks.begin() + static_cast<std::ptrdiff_t>(c0),
                                clicks.begin() + static_cast<std::ptrdiff_t>(c1));
            const std::size_t p0 = pairs.size() * b / n_batches;
            const std::size_t p1 = pairs.size() * (b + 1) / n_batches;
            batch.kg_pairs.assign(pairs.begin() + static_cast<std::ptrdiff_t>(p0),
                                  pairs.begin() + static_cast<std::ptrdiff_t>(p1));
            batch.align_entities = entities;

            LossBreakdown loss;
            model::Model grads = compute_gradients(m, ctx, batch, &loss);
            if (!std::isfinite(loss.total))
                throw Error(ErrorCode::DivergedLoss, "batch loss is not finite at epoch " + std::to_string(epoch));
            if (config.grad_clip) clip_global_norm(grads, *config.grad_clip);
            adam.step(m, grads, lr, config.weight_decay);
            embed::renormalize_entities(m.kg.entity);
        }

        double train_loss = 0.0;
        double test_loss = 0.0;
        evaluate(train_loss, test_loss);
        if (!std::isfinite(train_loss) || train_loss > 10.0 * initial) {
            throw Error(ErrorCode::DivergedLoss, "train loss " + std::to_string(train_loss) + " at epoch " +
                                                     std::to_string(epoch) + " (initial " + std::to_string(initial) + ")");
        }
        result.curve.train.push_back(train_loss);
        result.curve.test.push_back(test_loss);
        if (on_epoch) on_epoch(epoch, train_loss, test_loss);
    }
    return result;
}

}  // namespace kgsr::train
