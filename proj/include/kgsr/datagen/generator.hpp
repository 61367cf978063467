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
#include <set>
#include <string>
#include <vector>

#include "kgsr/io/config.hpp"
#include "kgsr/kg/graph_io.hpp"

namespace kgsr::datagen {

struct SyntheticConfig {
    int n_users = 2000;
    int n_ads = 1000;
    int n_products = 500;
    int n_categories = 32;
    int n_interactions = 50000;
    double avg_tags_per_user = 4.7;
    double avg_text_len = 28.0;
    int n_latent_topics = 16;
    double noise_rate = 0.05;
    std::uint64_t seed = 42;

    // Shape of the latent model. Lower concentration gives peakier user
    // interests; the sharpness terms control how strongly impressions and
    // clicks follow topic affinity.
    double user_topic_concentration = 0.15;
    double impression_sharpness = 60.0;
    double click_sharpness = 20.0;
    double click_midpoint = 0.75;
    int vocab_words = 4096;

    /// Throws InvalidConfig.
    void validate() const;

    static const std::set<std::string>& known_keys();
    /// Reads the `gen.*` keys present in `file`.
    static SyntheticConfig from_config(const io::ConfigFile& file);
};

/// Latent draws behind a dataset, kept for the Bayes-optimal ranker.
struct LatentState {
    int topics = 0;
    std::vector<std::string> user_ids;
    std::vector<std::vector<double>> user_topics;  // n_users x topics, rows sum to 1
    std::vector<std::string> ad_ids;
    std::vector<std::vector<double>> ad_topics;  // n_ads x topics, rows sum to 1

    /// Topic affinity theta_u . phi_a; clicks are monotone in it.
    double affinity(std::size_t user, std::size_t ad) const;
};

struct Dataset {
    std::vector<kg::Entity> entities;
    std::vector<kg::TripleSpec> triples;  // everything except Clicks
    std::vector<kg::RawInteraction> interactions;
    std::vector<kg::AdText> ad_texts;
    std::vector<kg::UserTags> user_tags;
    LatentState latent;
};

/// Deterministic for a given config (including seed).
Dataset generate(const SyntheticConfig& config);

struct BundlePaths {
    std::string dir;
    std::string entities;
    std::string triples;
    std::string interactions;
    std::string ad_texts;
    std::string user_tags;
    std::string manifest;
    std::string latent;  // written only on request

    static BundlePaths in(const std::string& dir);
};

/// Writes every bundle file plus manifest.json (config echo, line counts,
/// seed, format versions and per-file CRC32). The latent dump is written
/// to latent.json only when `dump_latent` is set.
BundlePaths write_bundle(const Dataset& data, const SyntheticConfig& config, const std::string& dir,
                         bool dump_latent);

LatentState load_latent(const std::string& path);

/// Per-column min-max scaling into [0, 1]; constant columns map to 0.
/// Throws EmptyColumn.
std::vector<std::vector<double>> normalize_features(const std::vector<std::vector<double>>& columns);

/// Deterministic pronounceable word for a vocabulary slot.
std::string synthetic_word(int index);

}  // namespace kgsr::datagen
