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

#include <optional>
#include <string>
#include <vector>

#include "kgsr/datagen/generator.hpp"
#include "kgsr/eval/evaluate.hpp"
#include "kgsr/eval/split.hpp"
#include "kgsr/train/trainer.hpp"

namespace kgsr::pipeline {

struct IndexConfig {
    index::IndexKind kind = index::IndexKind::Hnsw;
    index::HnswParams hnsw;
    index::IvfParams ivf;
};

/// Everything the CLI stages read from one flat config file. Keys are
/// prefixed by stage: gen.*, split.*, train.*, model.*, index.*, eval.*.
struct PipelineConfig {
    datagen::SyntheticConfig gen;
    eval::SplitRatios ratios;
    std::uint64_t split_seed = 42;
    train::TrainConfig train;
    IndexConfig index;
    eval::EvalConfig eval;
    std::uint64_t eval_seed = 42;

    /// Throws InvalidConfig on unknown keys or bad values.
    static PipelineConfig from_config(const io::ConfigFile& file);
    static PipelineConfig load(const std::string& path);
    /// Overrides every stage seed.
    void set_seed(std::uint64_t seed);
};

struct Corpus {
    std::vector<kg::Entity> entities;
    std::vector<kg::TripleSpec> triples;
    std::vector<kg::RawInteraction> interactions;
    std::vector<kg::AdText> ad_texts;
    std::vector<kg::UserTags> user_tags;
};

Corpus load_corpus(const std::string& bundle_dir);

/// Non-click triples plus one Clicks edge per positive train interaction.
/// Test and validation interactions never enter the graph.
kg::KnowledgeGraph build_train_graph(const Corpus& corpus, const eval::UserSplit& split);

/// One token sequence per graph entity: ads use their text, users their
/// sorted tags, everything else its label.
std::vector<text::TokenSeq> entity_tokens(const kg::KnowledgeGraph& graph, const Corpus& corpus,
                                          std::uint32_t vocab_size);

/// Graph, tokens and split, ready for training or evaluation.
struct Workspace {
    Corpus corpus;
    eval::UserSplit split;
    kg::KnowledgeGraph graph;
    std::vector<text::TokenSeq> tokens;

    train::TrainData train_data() const;
    /// Test users with at least one click; nothing is excluded since test
    /// users have no training interactions.
    std::vector<eval::TestQuery> test_queries() const;
    std::vector<std::uint32_t> ads() const;
};

Workspace prepare(Corpus corpus, const PipelineConfig& config);

/// Fused vectors of every ad, keyed by entity id.
index::VectorStore ad_store(const model::Model& m, const Workspace& ws);
index::VectorIndex build_index(index::VectorStore store, const IndexConfig& config);

// Work-directory layout shared by the CLI stages.
struct WorkDir {
    std::string root;
    std::string data() const { return root + "/data"; }
    std::string graph_dir() const { return root + "/graph"; }
    std::string model() const { return root + "/model.kgsr"; }
    std::string loss_csv() const { return root + "/loss.csv"; }
    std::string index() const { return root + "/index.kgsi"; }
    std::string metrics() const { return root + "/metrics.jsonl"; }
};

/// Writes graph/entities.tsv, graph/triples.tsv and graph/split.json.
void save_graph(const WorkDir& dir, const Workspace& ws);
/// Rebuilds a workspace from the bundle and a saved graph, checking the
/// saved graph against the split (leakage audit).
Workspace load_workspace(const WorkDir& dir, const PipelineConfig& config);

struct RankerReport {
    std::string name;
    eval::MetricsReport report;
};

struct EvalSummary {
    eval::ModelEvaluation model;
    std::vector<RankerReport> baselines;  // random, popularity, and the oracle when latent state exists
};

EvalSummary evaluate_all(const Workspace& ws, const model::Model& m, const index::VectorIndex& index,
                         const PipelineConfig& config, const std::optional<datagen::LatentState>& latent);

/// Table and JSON lines (one object per ranker, with a `ranker` key).
std::string summary_table(const EvalSummary& s);
std::string summary_json_lines(const EvalSummary& s);

}  // namespace kgsr::pipeline
