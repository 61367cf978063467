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

#include "kgsr/pipeline/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "kgsr/error.hpp"
#include "kgsr/io/binary.hpp"

namespace kgsr::pipeline {

using nlohmann::json;

namespace {

const std::set<std::string>& own_keys() {
    static const std::set<std::string> keys = {
        "split.train",     "split.valid",         "split.test",      "split.seed",
        "index.kind",      "index.m",             "index.ef_construction", "index.seed",
        "index.nlist",     "index.kmeans_iters",  "eval.retrieve_k", "eval.ef_search",
        "eval.nprobe",     "eval.latency_threshold_ms", "eval.seed",
    };
    return keys;
}

}  // namespace

PipelineConfig PipelineConfig::from_config(const io::ConfigFile& f) {
    std::set<std::string> known = own_keys();
    known.insert(datagen::SyntheticConfig::known_keys().begin(), datagen::SyntheticConfig::known_keys().end());
    known.insert(train::TrainConfig::known_keys().begin(), train::TrainConfig::known_keys().end());
    f.check_known(known);

    PipelineConfig c;
    c.gen = datagen::SyntheticConfig::from_config(f);
    c.train = train::TrainConfig::from_config(f);
    c.ratios.train = f.get_double("split.train", c.ratios.train);
    c.ratios.valid = f.get_double("split.valid", c.ratios.valid);
    c.ratios.test = f.get_double("split.test", c.ratios.test);
    c.split_seed = static_cast<std::uint64_t>(f.get_int("split.seed", static_cast<std::int64_t>(c.split_seed)));
    c.index.kind = index::parse_index_kind(f.get_string("index.kind", std::string(index::to_string(c.index.kind))));
    c.index.hnsw.m = static_cast<int>(f.get_int("index.m", c.index.hnsw.m));
    c.index.hnsw.ef_construction = static_cast<int>(f.get_int("index.ef_construction", c.index.hnsw.ef_construction));
    c.index.hnsw.seed = static_cast<std::uint64_t>(f.get_int("index.seed", static_cast<std::int64_t>(c.index.hnsw.seed)));
    c.index.ivf.seed = c.index.hnsw.seed;
    c.index.ivf.nlist = static_cast<int>(f.get_int("index.nlist", c.index.ivf.nlist));
    c.index.ivf.kmeans_iters = static_cast<int>(f.get_int("index.kmeans_iters", c.index.ivf.kmeans_iters));
    c.eval.retrieve_k = static_cast<int>(f.get_int("eval.retrieve_k", c.eval.retrieve_k));
    c.eval.search.ef_search = static_cast<int>(f.get_int("eval.ef_search", c.eval.search.ef_search));
    c.eval.search.nprobe = static_cast<int>(f.get_int("eval.nprobe", c.eval.search.nprobe));
    c.eval.latency_threshold_ms = f.get_double("eval.latency_threshold_ms", c.eval.latency_threshold_ms);
    c.eval_seed = static_cast<std::uint64_t>(f.get_int("eval.seed", static_cast<std::int64_t>(c.eval_seed)));
    if (c.eval.retrieve_k < 1 || c.eval.search.ef_search < 1 || c.eval.search.nprobe < 1)
        throw Error(ErrorCode::InvalidConfig, "eval.retrieve_k, eval.ef_search and eval.nprobe must be >= 1");
    return c;
}

PipelineConfig PipelineConfig::load(const std::string& path) { return from_config(io::ConfigFile::load(path)); }

void PipelineConfig::set_seed(std::uint64_t seed) {
    gen.seed = seed;
    split_seed = seed;
    train.seed = seed;
    index.hnsw.seed = seed;
    index.ivf.seed = seed;
    eval_seed = seed;
}

Corpus load_corpus(const std::string& bundle_dir) {
    const auto p = datagen::BundlePaths::in(bundle_dir);
    Corpus c;
    c.entities = kg::load_entities(p.entities);
    c.triples = kg::load_triples(p.triples);
    c.interactions = kg::load_interactions(p.interactions);
    c.ad_texts = kg::load_ad_texts(p.ad_texts);
    c.user_tags = kg::load_user_tags(p.user_tags);
    return c;
}

kg::KnowledgeGraph build_train_graph(const Corpus& corpus, const eval::UserSplit& split) {
    std::vector<kg::TripleSpec> triples;
    for (const auto& t : corpus.triples)
        if (t.relation != kg::RelationKind::Clicks) triples.push_back(t);
    for (const auto& r : split.train)
        if (r.label == 1) triples.push_back({r.user, kg::RelationKind::Clicks, r.ad});
    auto graph = kg::KnowledgeGraph::build(corpus.entities, triples);
    eval::audit_graph_leakage(graph, split.train_users);
    return graph;
}

std::vector<text::TokenSeq> entity_tokens(const kg::KnowledgeGraph& graph, const Corpus& corpus,
                                          std::uint32_t vocab_size) {
    std::unordered_map<std::string, const std::string*> ad_text;
    for (const auto& a : corpus.ad_texts) ad_text[a.ad_id] = &a.text;
    std::unordered_map<std::string, const std::vector<std::string>*> tags;
    for (const auto& u : corpus.user_tags) tags[u.user_id] = &u.tags;

    std::vector<text::TokenSeq> out;
    out.reserve(graph.entity_count());
    for (const auto& e : graph.entities()) {
        if (e.kind == kg::EntityKind::Ad) {
            if (auto it = ad_text.find(e.id); it != ad_text.end()) {
                out.push_back(text::tokenize(*it->second, vocab_size));
                continue;
            }
        } else if (e.kind == kg::EntityKind::User) {
            if (auto it = tags.find(e.id); it != tags.end() && !it->second->empty()) {
                out.push_back(text::user_tokens(*it->second, vocab_size));
                continue;
            }
        }
        out.push_back(text::tokenize(e.label.empty() ? e.id : e.label, vocab_size));
    }
    return out;
}

train::TrainData Workspace::train_data() const {
    train::TrainData d;
    d.graph = &graph;
    d.tokens = &tokens;
    for (const auto& r : split.train)
        if (r.label == 1) d.train_clicks.push_back({graph.require(r.user), graph.require(r.ad), 1});
    for (const auto& r : split.test)
        if (r.label == 1) d.test_clicks.push_back({graph.require(r.user), graph.require(r.ad), 1});
    return d;
}

std::vector<eval::TestQuery> Workspace::test_queries() const {
    std::map<std::string, std::vector<std::uint32_t>> clicked;
    for (const auto& r : split.test)
        if (r.label == 1) clicked[r.user].push_back(graph.require(r.ad));
    std::map<std::string, std::vector<std::uint32_t>> seen_in_train;
    for (const auto& r : split.train) seen_in_train[r.user].push_back(graph.require(r.ad));

    std::vector<eval::TestQuery> out;
    for (const auto& u : split.test_users) {
        auto it = clicked.find(u);
        if (it == clicked.end()) continue;
        eval::TestQuery q{graph.require(u), eval::make_truth(it->second), {}};
        if (auto s = seen_in_train.find(u); s != seen_in_train.end()) q.exclude = eval::make_truth(s->second);
        out.push_back(std::move(q));
    }
    // Ascending entity order keeps evaluation independent of split order.
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.user < b.user; });
    return out;
}

std::vector<std::uint32_t> Workspace::ads() const {
    const auto ads = graph.entities_of_kind(kg::EntityKind::Ad);
    return {ads.begin(), ads.end()};
}

Workspace prepare(Corpus corpus, const PipelineConfig& config) {
    Workspace ws;
    ws.split = eval::split_by_user(corpus.interactions, config.ratios, config.split_seed);
    ws.graph = build_train_graph(corpus, ws.split);
    ws.tokens = entity_tokens(ws.graph, corpus, config.train.dims.vocab_size);
    ws.corpus = std::move(corpus);
    return ws;
}

index::VectorStore ad_store(const model::Model& m, const Workspace& ws) {
    const Matrix fused = model::fused_embeddings(m, ws.tokens);
    const auto ads = ws.ads();
    Matrix v(static_cast<Eigen::Index>(ads.size()), fused.cols());
    for (std::size_t i = 0; i < ads.size(); ++i) v.row(static_cast<Eigen::Index>(i)) = fused.row(ads[i]);
    return index::VectorStore::make(ads, std::move(v));
}

index::VectorIndex build_index(index::VectorStore store, const IndexConfig& config) {
    switch (config.kind) {
        case index::IndexKind::Exact: return index::VectorIndex(std::move(store));
        case index::IndexKind::Hnsw: return index::VectorIndex(index::HnswIndex::build(std::move(store), config.hnsw));
        case index::IndexKind::Ivf: {
            auto p = config.ivf;
            p.nlist = std::min<int>(p.nlist, static_cast<int>(store.size()));
            return index::VectorIndex(index::IvfIndex::build(std::move(store), p));
        }
    }
    throw Error(ErrorCode::InvalidConfig, "unknown index kind");
}

void save_graph(const WorkDir& dir, const Workspace& ws) {
    std::filesystem::create_directories(dir.graph_dir());
    {
        std::ofstream out(dir.graph_dir() + "/entities.tsv", std::ios::binary);
        kg::write_entities(out, {ws.graph.entities().begin(), ws.graph.entities().end()});
    }
    {
        std::ofstream out(dir.graph_dir() + "/triples.tsv", std::ios::binary);
        kg::write_triples(out, kg::triple_specs(ws.graph));
    }
    const json split{{"train_users", ws.split.train_users},
                     {"valid_users", ws.split.valid_users},
                     {"test_users", ws.split.test_users}};
    const std::string body = split.dump(1) + "\n";
    io::write_file(dir.graph_dir() + "/split.json", {reinterpret_cast<const std::uint8_t*>(body.data()), body.size()});
}

Workspace load_workspace(const WorkDir& dir, const PipelineConfig& config) {
    Workspace ws;
    ws.corpus = load_corpus(dir.data());
    const auto bytes = io::read_file(dir.graph_dir() + "/split.json");
    try {
        const json j = json::parse(bytes.begin(), bytes.end());
        ws.split.train_users = j.at("train_users").get<std::vector<std::string>>();
        ws.split.valid_users = j.at("valid_users").get<std::vector<std::string>>();
        ws.split.test_users = j.at("test_users").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, dir.graph_dir() + "/split.json: " + e.what());
    }
    std::unordered_map<std::string, int> part;
    for (const auto& u : ws.split.train_users) part[u] = 0;
    for (const auto& u : ws.split.valid_users) part[u] = 1;
    for (const auto& u : ws.split.test_users) part[u] = 2;
    for (const auto& r : ws.corpus.interactions) {
        auto it = part.find(r.user);
        if (it == part.end()) throw Error(ErrorCode::UnknownEntity, "user " + r.user + " is in no split");
        (it->second == 0 ? ws.split.train : it->second == 1 ? ws.split.valid : ws.split.test).push_back(r);
    }
    if (!eval::leaked_users(ws.split).empty()) throw Error(ErrorCode::InvalidConfig, "leakage: split is not user-disjoint");

    ws.graph = kg::KnowledgeGraph::build(kg::load_entities(dir.graph_dir() + "/entities.tsv"),
                                         kg::load_triples(dir.graph_dir() + "/triples.tsv"));
    eval::audit_graph_leakage(ws.graph, ws.split.train_users);
    ws.tokens = entity_tokens(ws.graph, ws.corpus, config.train.dims.vocab_size);
    return ws;
}

EvalSummary evaluate_all(const Workspace& ws, const model::Model& m, const index::VectorIndex& index,
                         const PipelineConfig& config, const std::optional<datagen::LatentState>& latent) {
    EvalSummary s;
    const auto queries = ws.test_queries();
    s.model = eval::evaluate_model(m, ws.graph, ws.tokens, index, queries, config.eval);

    const auto ads = ws.ads();
    const auto limit = static_cast<std::size_t>(config.eval.retrieve_k);
    s.baselines.push_back({"random", eval::evaluate_ranker(queries, eval::random_ranker(ads, config.eval_seed), limit)});

    std::vector<kg::InteractionRecord> train;
    for (const auto& r : ws.split.train) train.push_back({ws.graph.require(r.user), ws.graph.require(r.ad), r.label, r.timestamp});
    s.baselines.push_back(
        {"popularity", eval::evaluate_ranker(queries, eval::popularity_ranker(eval::popularity_order(train, ads)), limit)});

    if (latent) {
        std::unordered_map<EntityId, std::size_t> user_row, ad_row;
        for (std::size_t i = 0; i < latent->user_ids.size(); ++i)
            if (auto id = ws.graph.find(latent->user_ids[i])) user_row[*id] = i;
        for (std::size_t i = 0; i < latent->ad_ids.size(); ++i)
            if (auto id = ws.graph.find(latent->ad_ids[i])) ad_row[*id] = i;
        auto score = [&](EntityId u, std::uint32_t a) {
            auto ur = user_row.find(u);
            auto ar = ad_row.find(a);
            if (ur == user_row.end() || ar == ad_row.end()) return 0.0;
            return latent->affinity(ur->second, ar->second);
        };
        s.baselines.push_back({"bayes_oracle", eval::evaluate_ranker(queries, eval::score_ranker(ads, score), limit)});
    }
    return s;
}

std::string summary_table(const EvalSummary& s) {
    std::vector<std::pair<std::string, eval::MetricsReport>> rows = {{"model (reranked)", s.model.reranked},
                                                                     {"model (raw ann)", s.model.raw}};
    for (const auto& b : s.baselines) rows.push_back({b.name, b.report});
    return eval::metrics_table(rows);
}

std::string summary_json_lines(const EvalSummary& s) {
    auto line = [](const std::string& name, const eval::MetricsReport& r) {
        auto j = json::parse(r.to_json_line());
        json out{{"ranker", name}};
        out.update(j);
        return out.dump() + "\n";
    };
    std::string out = line("model_reranked", s.model.reranked) + line("model_raw", s.model.raw);
    for (const auto& b : s.baselines) out += line(b.name, b.report);
    return out;
}

}  // namespace kgsr::pipeline
