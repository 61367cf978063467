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


#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <unistd.h>

#include "kgsr/error.hpp"
#include "kgsr/pipeline/pipeline.hpp"

namespace kgsr::pipeline {
namespace {

namespace fs = std::filesystem;

template <class F>
ErrorCode code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no kgsr::Error thrown";
    return ErrorCode::IoError;
}

PipelineConfig tiny_config() {
    auto c = PipelineConfig::from_config(io::ConfigFile::parse(R"(
gen.n_users = 150
gen.n_ads = 80
gen.n_products = 40
gen.n_categories = 6
gen.n_interactions = 4000
gen.n_latent_topics = 4
gen.vocab_words = 512
model.vocab_size = 512
train.epochs = 3
train.batch_size = 256
eval.retrieve_k = 30
)"));
    c.set_seed(17);
    return c;
}

class TinyPipeline : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        root_ = fs::temp_directory_path() / ("kgsr_pipeline_" + std::to_string(::getpid()));
        fs::remove_all(root_);
        const auto c = tiny_config();
        const WorkDir dir{root_.string()};
        datagen::write_bundle(datagen::generate(c.gen), c.gen, dir.data(), true);
        ws_ = new Workspace(prepare(load_corpus(dir.data()), c));
        result_ = new train::TrainResult(train::train(c.train, ws_->train_data()));
    }
    static void TearDownTestSuite() {
        delete result_;
        delete ws_;
        fs::remove_all(root_);
    }

    static inline fs::path root_;
    static inline Workspace* ws_ = nullptr;
    static inline train::TrainResult* result_ = nullptr;
};

TEST_F(TinyPipeline, GraphHoldsOnlyTrainClicks) {
    const std::set<std::string> train_users(ws_->split.train_users.begin(), ws_->split.train_users.end());
    for (const auto& t : ws_->graph.triples()) {
        if (t.relation == kg::RelationKind::Clicks) EXPECT_TRUE(train_users.count(ws_->graph.entity(t.head).id));
    }
    EXPECT_TRUE(eval::leaked_users(ws_->split).empty());
    EXPECT_EQ(ws_->tokens.size(), ws_->graph.entity_count());
    for (const auto& seq : ws_->tokens) EXPECT_FALSE(seq.ids.empty());
}

TEST_F(TinyPipeline, QueriesAreColdTestUsers) {
    const auto qs = ws_->test_queries();
    ASSERT_FALSE(qs.empty());
    const std::set<std::string> test_users(ws_->split.test_users.begin(), ws_->split.test_users.end());
    for (const auto& q : qs) {
        EXPECT_TRUE(test_users.count(ws_->graph.entity(q.user).id));
        EXPECT_FALSE(q.truth.empty());
        EXPECT_TRUE(q.exclude.empty());
    }
}

TEST_F(TinyPipeline, RerankPermutesRetrievedCandidates) {
    const auto c = tiny_config();
    const auto idx = build_index(ad_store(result_->model, *ws_), c.index);
    EXPECT_TRUE(idx.audit().ok());
    auto qs = ws_->test_queries();
    // Excluded ads must not be returned.
    qs.front().exclude = {ws_->ads().front()};
    const auto ev = eval::evaluate_model(result_->model, ws_->graph, ws_->tokens, idx, qs, c.eval);
    ASSERT_EQ(ev.raw_lists.size(), qs.size());
    for (std::size_t i = 0; i < qs.size(); ++i) {
        auto a = ev.raw_lists[i], b = ev.reranked_lists[i];
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        EXPECT_EQ(a, b);
        for (auto x : qs[i].exclude) EXPECT_EQ(std::count(ev.raw_lists[i].begin(), ev.raw_lists[i].end(), x), 0);
    }
    EXPECT_EQ(ev.raw.users, qs.size());
}

TEST_F(TinyPipeline, SummaryHasEveryRanker) {
    const auto c = tiny_config();
    const auto idx = build_index(ad_store(result_->model, *ws_), c.index);
    const auto latent = datagen::load_latent(datagen::BundlePaths::in(WorkDir{root_.string()}.data()).latent);
    const auto s = evaluate_all(*ws_, result_->model, idx, c, latent);
    std::set<std::string> names;
    for (const auto& b : s.baselines) names.insert(b.name);
    EXPECT_EQ(names, (std::set<std::string>{"random", "popularity", "bayes_oracle"}));
    const auto lines = summary_json_lines(s);
    EXPECT_EQ(std::count(lines.begin(), lines.end(), '\n'), 5);
    EXPECT_NE(summary_table(s).find("popularity"), std::string::npos);
}

TEST_F(TinyPipeline, SavedGraphReloadsIdentically) {
    const auto c = tiny_config();
    const WorkDir dir{root_.string()};
    save_graph(dir, *ws_);
    const auto back = load_workspace(dir, c);
    EXPECT_EQ(back.graph.entity_count(), ws_->graph.entity_count());
    EXPECT_TRUE(std::ranges::equal(back.graph.triples(), ws_->graph.triples()));
    ASSERT_EQ(back.tokens.size(), ws_->tokens.size());
    for (std::size_t i = 0; i < back.tokens.size(); ++i) EXPECT_EQ(back.tokens[i].ids, ws_->tokens[i].ids);
    EXPECT_EQ(back.split.test_users, ws_->split.test_users);
}

TEST(PipelineConfig, DefaultFileParses) {
    const auto c = PipelineConfig::load(KGSR_SOURCE_DIR "/configs/default.conf");
    EXPECT_EQ(c.train.dims.hidden_dim, 64);
    EXPECT_EQ(c.gen.n_users, 2000);
    EXPECT_EQ(c.index.kind, index::IndexKind::Hnsw);
}

TEST(PipelineConfig, RejectsUnknownKeysAndBadValues) {
    EXPECT_EQ(code_of([] { PipelineConfig::from_config(io::ConfigFile::parse("train.epochz = 3\n")); }),
              ErrorCode::InvalidConfig);
    EXPECT_EQ(code_of([] { PipelineConfig::from_config(io::ConfigFile::parse("eval.nprobe = 0\n")); }),
              ErrorCode::InvalidConfig);
    EXPECT_EQ(code_of([] { PipelineConfig::from_config(io::ConfigFile::parse("index.kind = annoy\n")); }),
              ErrorCode::InvalidConfig);
}

TEST(PipelineConfig, SeedOverridesEveryStage) {
    PipelineConfig c;
    c.set_seed(99);
    EXPECT_EQ(c.gen.seed, 99u);
    EXPECT_EQ(c.split_seed, 99u);
    EXPECT_EQ(c.train.seed, 99u);
    EXPECT_EQ(c.index.hnsw.seed, 99u);
    EXPECT_EQ(c.index.ivf.seed, 99u);
    EXPECT_EQ(c.eval_seed, 99u);
}

}  // namespace
}  // namespace kgsr::pipeline
