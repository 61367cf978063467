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

#include "kgsr/datagen/generator.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "kgsr/error.hpp"
#include "kgsr/io/binary.hpp"

namespace kgsr::datagen {

using nlohmann::json;

void SyntheticConfig::validate() const {
    auto need = [](bool ok, const char* msg) {
        if (!ok) throw Error(ErrorCode::InvalidConfig, msg);
    };
    need(n_users >= 1 && n_ads >= 1 && n_products >= 1 && n_categories >= 1, "entity counts must be >= 1");
    need(n_interactions >= 1, "n_interactions must be >= 1");
    need(n_latent_topics >= 1, "n_latent_topics must be >= 1");
    need(avg_tags_per_user >= 1.0, "avg_tags_per_user must be >= 1");
    need(avg_text_len >= 1.0, "avg_text_len must be >= 1");
    need(noise_rate >= 0.0 && noise_rate <= 1.0, "noise_rate must be in [0, 1]");
    need(user_topic_concentration > 0.0, "user_topic_concentration must be positive");
    need(impression_sharpness >= 0.0 && click_sharpness >= 0.0, "sharpness terms must be non-negative");
    need(vocab_words >= 2 * n_latent_topics, "vocab_words too small for the topic count");
    need(vocab_words <= 85 * 85 * 85, "vocab_words too large");
}

const std::set<std::string>& SyntheticConfig::known_keys() {
    static const std::set<std::string> keys = {
        "gen.n_users",          "gen.n_ads",          "gen.n_products",
        "gen.n_categories",     "gen.n_interactions", "gen.avg_tags_per_user",
        "gen.avg_text_len",     "gen.n_latent_topics", "gen.noise_rate",
        "gen.seed",             "gen.user_topic_concentration", "gen.impression_sharpness",
        "gen.click_sharpness",  "gen.click_midpoint", "gen.vocab_words",
    };
    return keys;
}

SyntheticConfig SyntheticConfig::from_config(const io::ConfigFile& f) {
    SyntheticConfig c;
    c.n_users = static_cast<int>(f.get_int("gen.n_users", c.n_users));
    c.n_ads = static_cast<int>(f.get_int("gen.n_ads", c.n_ads));
    c.n_products = static_cast<int>(f.get_int("gen.n_products", c.n_products));
    c.n_categories = static_cast<int>(f.get_int("gen.n_categories", c.n_categories));
    c.n_interactions = static_cast<int>(f.get_int("gen.n_interactions", c.n_interactions));
    c.avg_tags_per_user = f.get_double("gen.avg_tags_per_user", c.avg_tags_per_user);
    c.avg_text_len = f.get_double("gen.avg_text_len", c.avg_text_len);
    c.n_latent_topics = static_cast<int>(f.get_int("gen.n_latent_topics", c.n_latent_topics));
    c.noise_rate = f.get_double("gen.noise_rate", c.noise_rate);
    c.seed = static_cast<std::uint64_t>(f.get_int("gen.seed", static_cast<std::int64_t>(c.seed)));
    c.user_topic_concentration = f.get_double("gen.user_topic_concentration", c.user_topic_concentration);
    c.impression_sharpness = f.get_double("gen.impression_sharpness", c.impression_sharpness);
    c.click_sharpness = f.get_double("gen.click_sharpness", c.click_sharpness);
    c.click_midpoint = f.get_double("gen.click_midpoint", c.click_midpoint);
    c.vocab_words = static_cast<int>(f.get_int("gen.vocab_words", c.vocab_words));
    c.validate();
    return c;
}

double LatentState::affinity(std::size_t user, std::size_t ad) const {
    const auto& u = user_topics[user];
    const auto& a = ad_topics[ad];
    double s = 0.0;
    for (int t = 0; t < topics; ++t) s += u[t] * a[t];
    return s;
}

std::string synthetic_word(int index) {
    static constexpr char consonants[] = "bcdfghjklmnprstvz";
    static constexpr char vowels[] = "aeiou";
    auto syllable = [](int s) {
        return std::string{consonants[s / 5], vowels[s % 5]};
    };
    std::string w = syllable(index % 85) + syllable((index / 85) % 85);
    if (index >= 85 * 85) w += syllable(index / (85 * 85));
    return w;
}

namespace {

std::vector<double> dirichlet(int k, double alpha, Rng& rng) {
    std::gamma_distribution<double> g(alpha, 1.0);
    std::vector<double> out(static_cast<std::size_t>(k));
    double sum = 0.0;
    for (auto& x : out) {
        x = g(rng);
        sum += x;
    }
    if (!(sum > 0.0)) {
        // Every draw underflowed: put all mass on one uniformly chosen topic.
        std::fill(out.begin(), out.end(), 0.0);
        out[std::uniform_int_distribution<int>(0, k - 1)(rng)] = 1.0;
        return out;
    }
    for (auto& x : out) x /= sum;
    return out;
}

int draw_index(const std::vector<double>& weights, Rng& rng) {
    std::discrete_distribution<int> d(weights.begin(), weights.end());
    return d(rng);
}

std::string pad(const char* prefix, int i, int width) {
    std::string digits = std::to_string(i);
    if (static_cast<int>(digits.size()) < width) digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
    return prefix + digits;
}

int digits_for(int n) { return static_cast<int>(std::to_string(std::max(n - 1, 0)).size()); }

// Vocabulary layout: each topic owns a contiguous block of words whose
// first `tag_words` entries double as interest tags; the tail of the
// vocabulary is topic-free background.
struct Vocabulary {
    int topics;
    int block;
    int tag_words;
    int background_begin;
    int size;

    Vocabulary(int vocab, int t) : topics(t), size(vocab) {
        block = std::max(2, static_cast<int>(0.75 * vocab) / t);
        tag_words = std::max(1, std::min(24, block / 4));
        background_begin = block * t;
    }

    int topic_word(int topic, Rng& rng) const {
        return topic * block + std::uniform_int_distribution<int>(0, block - 1)(rng);
    }
    int tag_word(int topic, Rng& rng) const {
        return topic * block + std::uniform_int_distribution<int>(0, tag_words - 1)(rng);
    }
    int background_word(Rng& rng) const {
        if (background_begin >= size) return std::uniform_int_distribution<int>(0, size - 1)(rng);
        return std::uniform_int_distribution<int>(background_begin, size - 1)(rng);
    }
};

constexpr double kTopicWordShare = 0.75;
constexpr std::int64_t kEpoch = 1'700'000'000;
constexpr std::int64_t kSpanSeconds = 30LL * 24 * 3600;

}  // namespace

Dataset generate(const SyntheticConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    const int T = cfg.n_latent_topics;
    const Vocabulary vocab(cfg.vocab_words, T);
    Dataset d;
    d.latent.topics = T;

    // Categories map onto topics round-robin.
    std::vector<std::vector<int>> cats_of_topic(static_cast<std::size_t>(T));
    for (int c = 0; c < cfg.n_categories; ++c) cats_of_topic[c % T].push_back(c);
    auto category_for_topic = [&](int topic, Rng& r) {
        const auto& cs = cats_of_topic[topic];
        if (cs.empty()) return topic % cfg.n_categories;
        return cs[std::uniform_int_distribution<std::size_t>(0, cs.size() - 1)(r)];
    };
    auto topic_phrase = [&](int topic, int words, Rng& r) {
        std::string s;
        for (int i = 0; i < words; ++i) {
            if (i) s += ' ';
            s += synthetic_word(vocab.topic_word(topic, r));
        }
        return s;
    };

    const int wu = digits_for(cfg.n_users), wa = digits_for(cfg.n_ads);
    const int wp = digits_for(cfg.n_products), wc = digits_for(cfg.n_categories);
    std::vector<std::string> user_id, ad_id, product_id, category_id;

    for (int c = 0; c < cfg.n_categories; ++c) {
        category_id.push_back(pad("c", c, wc));
        d.entities.push_back({category_id.back(), kg::EntityKind::Category, topic_phrase(c % T, 2, rng)});
    }

    std::vector<int> product_category(static_cast<std::size_t>(cfg.n_products));
    for (int p = 0; p < cfg.n_products; ++p) {
        product_category[p] = std::uniform_int_distribution<int>(0, cfg.n_categories - 1)(rng);
        product_id.push_back(pad("p", p, wp));
        d.entities.push_back({product_id.back(), kg::EntityKind::Product, topic_phrase(product_category[p] % T, 3, rng)});
        d.triples.push_back({product_id.back(), kg::RelationKind::BelongsTo, category_id[product_category[p]]});
    }

    // Ads: a dominant topic inherited from the promoted product's category,
    // blended with a diffuse mixture by a per-ad purity.
    std::normal_distribution<double> text_len(cfg.avg_text_len, 4.0);
    std::uniform_real_distribution<double> purity_dist(0.3, 1.0);
    std::bernoulli_distribution topical(kTopicWordShare);
    for (int a = 0; a < cfg.n_ads; ++a) {
        const int product = std::uniform_int_distribution<int>(0, cfg.n_products - 1)(rng);
        const int topic = product_category[product] % T;
        const double purity = purity_dist(rng);
        auto phi = dirichlet(T, 0.3, rng);
        for (int t = 0; t < T; ++t) phi[t] = (1.0 - purity) * phi[t] + (t == topic ? purity : 0.0);

        ad_id.push_back(pad("ad", a, wa));
        d.entities.push_back({ad_id.back(), kg::EntityKind::Ad, ad_id.back()});
        d.triples.push_back({ad_id.back(), kg::RelationKind::Promotes, product_id[product]});

        const int len = std::max(1, static_cast<int>(std::lround(text_len(rng))));
        std::string text;
        for (int i = 0; i < len; ++i) {
            const int word = topical(rng) ? vocab.topic_word(draw_index(phi, rng), rng) : vocab.background_word(rng);
            if (i) text += ' ';
            text += synthetic_word(word);
        }
        d.ad_texts.push_back({ad_id.back(), std::move(text)});
        d.latent.ad_ids.push_back(ad_id.back());
        d.latent.ad_topics.push_back(std::move(phi));
    }

    // Users: peaked topic mixtures, interest tags drawn from them, and a few
    // liked categories.
    std::poisson_distribution<int> extra_tags(cfg.avg_tags_per_user - 1.0);
    std::vector<int> tag_topic_of_word(static_cast<std::size_t>(cfg.vocab_words), -1);
    std::set<int> used_tags;
    std::vector<kg::TripleSpec> user_triples;
    for (int u = 0; u < cfg.n_users; ++u) {
        auto theta = dirichlet(T, cfg.user_topic_concentration, rng);
        user_id.push_back(pad("u", u, wu));
        d.entities.push_back({user_id.back(), kg::EntityKind::User, user_id.back()});

        const int want = std::min(1 + extra_tags(rng), vocab.tag_words * T);
        std::set<int> tags;
        for (int attempt = 0; static_cast<int>(tags.size()) < want && attempt < 50 * want; ++attempt) {
            const int topic = draw_index(theta, rng);
            const int word = vocab.tag_word(topic, rng);
            tags.insert(word);
            tag_topic_of_word[word] = topic;
        }
        kg::UserTags ut{user_id.back(), {}};
        for (int w : tags) {
            ut.tags.push_back(synthetic_word(w));
            used_tags.insert(w);
            user_triples.push_back({user_id.back(), kg::RelationKind::InterestedIn, "tag_" + synthetic_word(w)});
        }
        std::sort(ut.tags.begin(), ut.tags.end());
        d.user_tags.push_back(std::move(ut));

        const int n_likes = std::uniform_int_distribution<int>(1, 3)(rng);
        std::set<int> liked;
        for (int i = 0; i < n_likes; ++i) liked.insert(category_for_topic(draw_index(theta, rng), rng));
        for (int c : liked) user_triples.push_back({user_id.back(), kg::RelationKind::LikesCategory, category_id[c]});

        d.latent.user_ids.push_back(user_id.back());
        d.latent.user_topics.push_back(std::move(theta));
    }

    // Tag entities exist only for words some user picked.
    for (int w : used_tags) {
        const std::string word = synthetic_word(w);
        d.entities.push_back({"tag_" + word, kg::EntityKind::InterestTag, word});
        const int topic = tag_topic_of_word[w];
        const auto& cs = cats_of_topic[topic];
        const int c = cs.empty() ? topic % cfg.n_categories : cs[static_cast<std::size_t>(w) % cs.size()];
        d.triples.push_back({"tag_" + word, kg::RelationKind::BelongsTo, category_id[c]});
    }
    d.triples.insert(d.triples.end(), user_triples.begin(), user_triples.end());

    // Impressions follow affinity through Gumbel top-k sampling; clicks
    // follow affinity relative to the user's best ad, then label noise.
    std::extreme_value_distribution<double> gumbel(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<std::int64_t> when(0, kSpanSeconds);
    const int base = cfg.n_interactions / cfg.n_users;
    const int remainder = cfg.n_interactions % cfg.n_users;
    std::vector<double> aff(static_cast<std::size_t>(cfg.n_ads));
    std::vector<std::pair<double, int>> keyed(static_cast<std::size_t>(cfg.n_ads));
    for (int u = 0; u < cfg.n_users; ++u) {
        const int n = std::min(cfg.n_ads, base + (u < remainder ? 1 : 0));
        double best = 0.0;
        for (int a = 0; a < cfg.n_ads; ++a) {
            aff[a] = d.latent.affinity(static_cast<std::size_t>(u), static_cast<std::size_t>(a));
            best = std::max(best, aff[a]);
            keyed[a] = {cfg.impression_sharpness * aff[a] + gumbel(rng), a};
        }
        std::partial_sort(keyed.begin(), keyed.begin() + n, keyed.end(),
                          [](const auto& x, const auto& y) { return x.first > y.first || (x.first == y.first && x.second < y.second); });
        std::vector<std::int64_t> stamps(static_cast<std::size_t>(n));
        for (auto& s : stamps) s = kEpoch + when(rng);
        std::sort(stamps.begin(), stamps.end());
        for (int i = 0; i < n; ++i) {
            const int a = keyed[i].second;
            const double rel = best > 0.0 ? aff[a] / best : 1.0;
            const double p = 1.0 / (1.0 + std::exp(-cfg.click_sharpness * (rel - cfg.click_midpoint)));
            bool click = unit(rng) < p;
            if (unit(rng) < cfg.noise_rate) click = !click;
            d.interactions.push_back({user_id[u], ad_id[a], click ? 1 : 0, stamps[i]});
        }
    }
    return d;
}

BundlePaths BundlePaths::in(const std::string& dir) {
    const std::filesystem::path p(dir);
    return {dir,
            (p / "entities.tsv").string(),
            (p / "triples.tsv").string(),
            (p / "interactions.jsonl").string(),
            (p / "ad_texts.jsonl").string(),
            (p / "user_tags.jsonl").string(),
            (p / "manifest.json").string(),
            (p / "latent.json").string()};
}

namespace {

// Writes `body` to `path`; returns (line count, crc32).
std::pair<std::size_t, std::uint32_t> emit(const std::string& path, const std::string& body) {
    const auto* bytes = reinterpret_cast<const std::uint8_t*>(body.data());
    io::write_file(path, {bytes, body.size()});
    return {static_cast<std::size_t>(std::count(body.begin(), body.end(), '\n')), io::crc32({bytes, body.size()})};
}

template <typename Writer, typename Rows>
std::string render(Writer w, const Rows& rows) {
    std::ostringstream out;
    w(out, rows);
    return out.str();
}

json config_json(const SyntheticConfig& c) {
    return json{{"n_users", c.n_users},
                {"n_ads", c.n_ads},
                {"n_products", c.n_products},
                {"n_categories", c.n_categories},
                {"n_interactions", c.n_interactions},
                {"avg_tags_per_user", c.avg_tags_per_user},
                {"avg_text_len", c.avg_text_len},
                {"n_latent_topics", c.n_latent_topics},
                {"noise_rate", c.noise_rate},
                {"seed", c.seed},
                {"user_topic_concentration", c.user_topic_concentration},
                {"impression_sharpness", c.impression_sharpness},
                {"click_sharpness", c.click_sharpness},
                {"click_midpoint", c.click_midpoint},
                {"vocab_words", c.vocab_words}};
}

}  // namespace

BundlePaths write_bundle(const Dataset& data, const SyntheticConfig& config, const std::string& dir,
                         bool dump_latent) {
    std::filesystem::create_directories(dir);
    const BundlePaths paths = BundlePaths::in(dir);

    json counts = json::object();
    json checksums = json::object();
    auto record = [&](const std::string& name, const std::string& path, const std::string& body) {
        const auto [lines, crc] = emit(path, body);
        counts[name] = lines;
        checksums[name] = crc;
    };
    record("entities", paths.entities, render(kg::write_entities, data.entities));
    record("triples", paths.triples, render(kg::write_triples, data.triples));
    record("interactions", paths.interactions, render(kg::write_interactions, data.interactions));
    record("ad_texts", paths.ad_texts, render(kg::write_ad_texts, data.ad_texts));
    record("user_tags", paths.user_tags, render(kg::write_user_tags, data.user_tags));

    if (dump_latent) {
        const json latent{{"topics", data.latent.topics},
                          {"user_ids", data.latent.user_ids},
                          {"user_topics", data.latent.user_topics},
                          {"ad_ids", data.latent.ad_ids},
                          {"ad_topics", data.latent.ad_topics}};
        emit(paths.latent, latent.dump() + "\n");
    }

    const json manifest{{"config", config_json(config)},
                        {"counts", counts},
                        {"checksums", checksums},
                        {"seed", config.seed},
                        {"format_versions",
                         {{"entities", 1}, {"triples", 1}, {"interactions", 1}, {"ad_texts", 1}, {"user_tags", 1}}},
                        {"reference_scale", {{"users", 1200000}, {"ads", 250000}, {"interactions", 20000000},
                                             {"categories", 320}}}};
    emit(paths.manifest, manifest.dump(2) + "\n");
    return paths;
}

LatentState load_latent(const std::string& path) {
    const auto bytes = io::read_file(path);
    LatentState s;
    try {
        const json j = json::parse(bytes.begin(), bytes.end());
        s.topics = j.at("topics").get<int>();
        s.user_ids = j.at("user_ids").get<std::vector<std::string>>();
        s.user_topics = j.at("user_topics").get<std::vector<std::vector<double>>>();
        s.ad_ids = j.at("ad_ids").get<std::vector<std::string>>();
        s.ad_topics = j.at("ad_topics").get<std::vector<std::vector<double>>>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, path + ": " + e.what());
    }
    if (s.user_ids.size() != s.user_topics.size() || s.ad_ids.size() != s.ad_topics.size())
        throw Error(ErrorCode::ParseError, path + ": id and topic lists differ in length");
    return s;
}

std::vector<std::vector<double>> normalize_features(const std::vector<std::vector<double>>& columns) {
    std::vector<std::vector<double>> out;
    out.reserve(columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
        const auto& col = columns[c];
        if (col.empty()) throw Error(ErrorCode::EmptyColumn, "column " + std::to_string(c) + " is empty");
        const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
        const double min = *lo, range = *hi - *lo;
        std::vector<double> scaled(col.size(), 0.0);
        if (range > 0.0)
            for (std::size_t i = 0; i < col.size(); ++i) scaled[i] = (col[i] - min) / range;
        out.push_back(std::move(scaled));
    }
    return out;
}

}  // namespace kgsr::datagen
