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
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <unistd.h>

#include "kgsr/datagen/generator.hpp"
#include "kgsr/error.hpp"
#include "kgsr/io/binary.hpp"
#include "kgsr/kg/knowledge_graph.hpp"

namespace kgsr::datagen {
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

SyntheticConfig small(std::uint64_t seed = 3) {
    SyntheticConfig c;
    c.n_users = 120;
    c.n_ads = 60;
    c.n_products = 30;
    c.n_categories = 6;
    c.n_interactions = 3000;
    c.n_latent_topics = 4;
    c.vocab_words = 512;
    c.seed = seed;
    return c;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch_dir(const std::string& name) {
    auto p = fs::temp_directory_path() / ("kgsr_datagen_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    return p;
}

TEST(Normalize, MinMaxHandCases) {
    auto out = normalize_features({{0, 5, 10}, {3, 3, 3}, {-2, 2}});
    EXPECT_EQ(out[0], (std::vector<double>{0, 0.5, 1}));
    EXPECT_EQ(out[1], (std::vector<double>{0, 0, 0}));
    EXPECT_EQ(out[2], (std::vector<double>{0, 1}));
    EXPECT_EQ(code_of([] { normalize_features({{1}, {}}); }), ErrorCode::EmptyColumn);
}

TEST(Normalize, RandomColumnsSpanUnitInterval) {
    Rng rng(5);
    std::normal_distribution<double> g(3.0, 40.0);
    std::uniform_int_distribution<int> len(2, 200);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> col(static_cast<std::size_t>(len(rng)));
        for (auto& x : col) x = g(rng);
        const auto out = normalize_features({col}).front();
        EXPECT_EQ(*std::min_element(out.begin(), out.end()), 0.0);
        EXPECT_EQ(*std::max_element(out.begin(), out.end()), 1.0);
        // Order is preserved.
        for (std::size_t i = 1; i < col.size(); ++i) EXPECT_EQ(col[i - 1] < col[i], out[i - 1] < out[i]);
    }
}

TEST(Words, DistinctAcrossTheVocabulary) {
    std::set<std::string> seen;
    for (int i = 0; i < 4096; ++i) seen.insert(synthetic_word(i));
    EXPECT_EQ(seen.size(), 4096u);
}

TEST(Generate, CountsAndReferentialIntegrity) {
    const auto cfg = small();
    const auto d = generate(cfg);
    std::map<kg::EntityKind, int> kinds;
    for (const auto& e : d.entities) ++kinds[e.kind];
    EXPECT_EQ(kinds[kg::EntityKind::User], 120);
    EXPECT_EQ(kinds[kg::EntityKind::Ad], 60);
    EXPECT_EQ(kinds[kg::EntityKind::Product], 30);
    EXPECT_EQ(kinds[kg::EntityKind::Category], 6);
    EXPECT_EQ(d.interactions.size(), 3000u);
    EXPECT_EQ(d.ad_texts.size(), 60u);
    EXPECT_EQ(d.user_tags.size(), 120u);
    for (const auto& t : d.triples) EXPECT_NE(t.relation, kg::RelationKind::Clicks);
    // Building the graph checks every id and kind.
    EXPECT_NO_THROW(kg::KnowledgeGraph::build(d.entities, d.triples));
    for (const auto& r : d.interactions) EXPECT_TRUE(r.label == 0 || r.label == 1);
    for (const auto& u : d.user_tags) {
        EXPECT_FALSE(u.tags.empty());
        EXPECT_TRUE(std::is_sorted(u.tags.begin(), u.tags.end()));
    }
}

TEST(Generate, LatentRowsAreDistributions) {
    const auto d = generate(small());
    ASSERT_EQ(d.latent.user_topics.size(), 120u);
    ASSERT_EQ(d.latent.ad_topics.size(), 60u);
    for (const auto* rows : {&d.latent.user_topics, &d.latent.ad_topics}) {
        for (const auto& r : *rows) {
            double s = 0;
            for (double x : r) {
                EXPECT_GE(x, 0.0);
                s += x;
            }
            EXPECT_NEAR(s, 1.0, 1e-12);
        }
    }
}

TEST(Generate, SingleTopicMakesAffinityUniform) {
    auto cfg = small();
    cfg.n_latent_topics = 1;
    const auto d = generate(cfg);
    for (std::size_t u = 0; u < 120; u += 7)
        for (std::size_t a = 0; a < 60; a += 5) EXPECT_EQ(d.latent.affinity(u, a), 1.0);
}

TEST(Generate, DefaultsMatchRequestedShape) {
    const auto d = generate(SyntheticConfig{});
    double tags = 0, words = 0;
    for (const auto& u : d.user_tags) tags += static_cast<double>(u.tags.size());
    for (const auto& a : d.ad_texts) words += static_cast<double>(std::count(a.text.begin(), a.text.end(), ' ') + 1);
    EXPECT_NEAR(tags / static_cast<double>(d.user_tags.size()), 4.7, 0.2);
    EXPECT_NEAR(words / static_cast<double>(d.ad_texts.size()), 28.0, 2.0);
}

TEST(Generate, ConfigValidation) {
    auto bad = small();
    bad.noise_rate = 1.5;
    EXPECT_EQ(code_of([&] { bad.validate(); }), ErrorCode::InvalidConfig);
    bad = small();
    bad.n_users = 0;
    EXPECT_EQ(code_of([&] { bad.validate(); }), ErrorCode::InvalidConfig);
    EXPECT_NO_THROW(small().validate());
}

TEST(Bundle, ByteIdenticalForSameSeed) {
    const auto a = scratch_dir("a"), b = scratch_dir("b"), c = scratch_dir("c");
    const auto pa = write_bundle(generate(small(8)), small(8), a.string(), true);
    const auto pb = write_bundle(generate(small(8)), small(8), b.string(), true);
    const auto pc = write_bundle(generate(small(9)), small(9), c.string(), false);
    for (auto member : {&BundlePaths::entities, &BundlePaths::triples, &BundlePaths::interactions,
                        &BundlePaths::ad_texts, &BundlePaths::user_tags, &BundlePaths::manifest, &BundlePaths::latent}) {
        EXPECT_EQ(slurp(pa.*member), slurp(pb.*member));
    }
    EXPECT_NE(slurp(pa.interactions), slurp(pc.interactions));
    EXPECT_FALSE(fs::exists(pc.latent));
    for (const auto& p : {a, b, c}) fs::remove_all(p);
}

TEST(Bundle, ManifestChecksumsAndReparse) {
    const auto dir = scratch_dir("m");
    const auto data = generate(small());
    const auto p = write_bundle(data, small(), dir.string(), true);
    const auto manifest = nlohmann::json::parse(slurp(p.manifest));
    const std::map<std::string, std::string> files = {{"entities", p.entities}, {"triples", p.triples},
                                                      {"interactions", p.interactions}, {"ad_texts", p.ad_texts},
                                                      {"user_tags", p.user_tags}};
    for (const auto& [name, path] : files) {
        const auto body = slurp(path);
        const auto crc = io::crc32({reinterpret_cast<const std::uint8_t*>(body.data()), body.size()});
        EXPECT_EQ(manifest["checksums"][name].get<std::uint32_t>(), crc) << name;
        EXPECT_EQ(manifest["counts"][name].get<std::size_t>(),
                  static_cast<std::size_t>(std::count(body.begin(), body.end(), '\n')));
    }
    EXPECT_EQ(manifest["seed"].get<std::uint64_t>(), 3u);

    const auto entities = kg::load_entities(p.entities);
    const auto triples = kg::load_triples(p.triples);
    EXPECT_EQ(entities.size(), data.entities.size());
    EXPECT_EQ(triples.size(), data.triples.size());
    EXPECT_NO_THROW(kg::KnowledgeGraph::build(entities, triples));
    const auto rows = kg::load_interactions(p.interactions);
    ASSERT_EQ(rows.size(), data.interactions.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i].user, data.interactions[i].user);
        EXPECT_EQ(rows[i].label, data.interactions[i].label);
        EXPECT_EQ(rows[i].timestamp, data.interactions[i].timestamp);
    }
    EXPECT_EQ(kg::load_ad_texts(p.ad_texts).back().text, data.ad_texts.back().text);
    EXPECT_EQ(kg::load_user_tags(p.user_tags).front().tags, data.user_tags.front().tags);

    const auto latent = load_latent(p.latent);
    EXPECT_EQ(latent.user_topics, data.latent.user_topics);
    EXPECT_EQ(latent.ad_ids, data.latent.ad_ids);
    fs::remove_all(dir);
}

TEST(Config, ReadsKnownKeysOnly) {
    auto c = SyntheticConfig::from_config(io::ConfigFile::parse("gen.n_users = 77\ngen.noise_rate = 0.1\n"));
    EXPECT_EQ(c.n_users, 77);
    EXPECT_EQ(c.noise_rate, 0.1);
    EXPECT_EQ(c.n_ads, SyntheticConfig{}.n_ads);
    EXPECT_EQ(code_of([] { io::ConfigFile::parse("gen.n_users = 5\nbogus = 1\n").check_known(SyntheticConfig::known_keys()); }),
              ErrorCode::InvalidConfig);
}

}  // namespace
}  // namespace kgsr::datagen
