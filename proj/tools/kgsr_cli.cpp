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

// Command-line driver: gen-data | build-kg | train | index | query | eval | gradcheck.
// Stages talk only through files under --out.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "kgsr/error.hpp"
#include "kgsr/io/binary.hpp"
#include "kgsr/pipeline/pipeline.hpp"
#include "kgsr/train/gradcheck.hpp"

using namespace kgsr;

namespace {

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "work";
    bool json = false;
    bool dump_latent = false;
    std::string index_kind;
    int k = 10;
    std::optional<int> ef_search;
    std::optional<int> nprobe;
    std::string user;
    std::string vector;
    int seeds = 20;
};

pipeline::PipelineConfig load_config(const Options& o) {
    pipeline::PipelineConfig c = o.config.empty() ? pipeline::PipelineConfig::from_config(io::ConfigFile::parse(""))
                                                  : pipeline::PipelineConfig::load(o.config);
    if (o.seed) c.set_seed(*o.seed);
    if (!o.index_kind.empty()) c.index.kind = index::parse_index_kind(o.index_kind);
    if (o.ef_search) c.eval.search.ef_search = *o.ef_search;
    if (o.nprobe) c.eval.search.nprobe = *o.nprobe;
    return c;
}

void write_text(const std::string& path, const std::string& body) {
    io::write_file(path, {reinterpret_cast<const std::uint8_t*>(body.data()), body.size()});
}

int cmd_gen_data(const Options& o) {
    const auto c = load_config(o);
    const pipeline::WorkDir dir{o.out};
    const auto data = datagen::generate(c.gen);
    const auto paths = datagen::write_bundle(data, c.gen, dir.data(), o.dump_latent);
    std::printf("wrote %zu entities, %zu triples, %zu interactions to %s\n", data.entities.size(), data.triples.size(),
                data.interactions.size(), paths.dir.c_str());
    return 0;
}

int cmd_build_kg(const Options& o) {
    const auto c = load_config(o);
    const pipeline::WorkDir dir{o.out};
    const auto ws = pipeline::prepare(pipeline::load_corpus(dir.data()), c);
    pipeline::save_graph(dir, ws);
    std::printf("graph: %zu entities, %zu triples; users train/valid/test = %zu/%zu/%zu\n", ws.graph.entity_count(),
                ws.graph.triple_count(), ws.split.train_users.size(), ws.split.valid_users.size(),
                ws.split.test_users.size());
    return 0;
}

int cmd_train(const Options& o) {
    const auto c = load_config(o);
    const pipeline::WorkDir dir{o.out};
    const auto ws = pipeline::load_workspace(dir, c);
    const auto start = std::chrono::steady_clock::now();
    const auto result = train::train(c.train, ws.train_data(), [&](int epoch, double tr, double te) {
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("epoch %3d  train %.6f  test %.6f  (%.1fs)\n", epoch, tr, te, s);
        std::fflush(stdout);
    });
    model::save_model(dir.model(), result.model);
    write_text(dir.loss_csv(), result.curve.to_csv());
    std::printf("initial train %.6f test %.6f; wrote %s and %s\n", result.initial_train_loss, result.initial_test_loss,
                dir.model().c_str(), dir.loss_csv().c_str());
    return 0;
}

int cmd_index(const Options& o) {
    const auto c = load_config(o);
    const pipeline::WorkDir dir{o.out};
    const auto ws = pipeline::load_workspace(dir, c);
    const auto m = model::load_model(dir.model());
    const auto idx = pipeline::build_index(pipeline::ad_store(m, ws), c.index);
    const auto audit = idx.audit();
    if (!audit.ok()) throw Error(ErrorCode::CorruptSnapshot, "index audit failed: " + audit.violations.front());
    index::save_index(dir.index(), idx);
    std::printf("%s index over %zu ads (dim %d) written to %s\n", std::string(index::to_string(idx.kind())).c_str(),
                idx.store().size(), idx.store().dim(), dir.index().c_str());
    return 0;
}

std::vector<double> parse_vector(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(ErrorCode::ParseError, "bad vector component `" + item + "`");
        }
    }
    return v;
}

int cmd_query(const Options& o) {
    const auto c = load_config(o);
    const pipeline::WorkDir dir{o.out};
    const auto idx = index::load_index(dir.index());
    std::vector<double> q;
    if (!o.vector.empty()) {
        q = parse_vector(o.vector);
    } else if (!o.user.empty()) {
        // Only the graph's entity table is needed to resolve the user.
        const auto graph = kg::KnowledgeGraph::build(kg::load_entities(dir.graph_dir() + "/entities.tsv"), {});
        const EntityId user = graph.require(o.user);
        if (graph.entity(user).kind != kg::EntityKind::User)
            throw Error(ErrorCode::UnknownEntity, "`" + o.user + "` is not a user");
        const auto ws = pipeline::load_workspace(dir, c);
        const auto m = model::load_model(dir.model());
        const Matrix fused = model::fused_embeddings(m, ws.tokens);
        const EntityId row = ws.graph.require(o.user);
        q.assign(fused.row(row).data(), fused.row(row).data() + fused.cols());
    } else {
        throw Error(ErrorCode::InvalidConfig, "query needs --user or --vector");
    }
    const auto hits = idx.search(q, o.k, c.eval.search);
    std::optional<kg::KnowledgeGraph> names;
    if (std::filesystem::exists(dir.graph_dir() + "/entities.tsv"))
        names = kg::KnowledgeGraph::build(kg::load_entities(dir.graph_dir() + "/entities.tsv"), {});
    std::printf("rank\tad\tdistance\n");
    for (std::size_t i = 0; i < hits.size(); ++i) {
        const std::string name = names && hits[i].id < names->entity_count() ? names->entity(hits[i].id).id
                                                                             : std::to_string(hits[i].id);
        std::printf("%zu\t%s\t%.9g\n", i + 1, name.c_str(), hits[i].distance);
    }
    return 0;
}

int cmd_eval(const Options& o) {
    const auto c = load_config(o);
    const pipeline::WorkDir dir{o.out};
    const auto ws = pipeline::load_workspace(dir, c);
    const auto m = model::load_model(dir.model());
    const auto idx = index::load_index(dir.index());
    std::optional<datagen::LatentState> latent;
    const auto latent_path = datagen::BundlePaths::in(dir.data()).latent;
    if (std::filesystem::exists(latent_path)) latent = datagen::load_latent(latent_path);
    const auto summary = pipeline::evaluate_all(ws, m, idx, c, latent);
    const auto lines = pipeline::summary_json_lines(summary);
    write_text(dir.metrics(), lines);
    if (o.json) {
        std::fputs(lines.c_str(), stdout);
    } else {
        std::fputs(pipeline::summary_table(summary).c_str(), stdout);
        const auto& l = summary.model.latency;
        std::printf("latency: avg %.1f us, p95 %.1f us, max %.1f us, within %.1f ms threshold: %s\n", l.avg_us, l.p95_us,
                    l.max_us, c.eval.latency_threshold_ms, l.within_threshold ? "yes" : "no");
    }
    return 0;
}

int cmd_gradcheck(const Options& o) {
    train::GradCheckOptions opts;
    double worst = 0.0;
    bool ok = true;
    const std::uint64_t base = o.seed.value_or(0);
    for (int i = 0; i < o.seeds; ++i) {
        const auto r = train::check_tiny_problem(base + static_cast<std::uint64_t>(i), opts);
        worst = std::max(worst, r.max_rel_error);
        ok = ok && r.passed;
        if (!o.json) std::printf("seed %llu  max rel error %.3e  %s\n", static_cast<unsigned long long>(base + i), r.max_rel_error, r.passed ? "ok" : "FAIL");
    }
    if (o.json) {
        std::printf("%s\n", nlohmann::json{{"seeds", o.seeds}, {"max_rel_error", worst}, {"tolerance", opts.tolerance},
                                           {"passed", ok}}.dump().c_str());
    } else {
        std::printf("max relative error %.3e over %d seeds (tolerance %.0e): %s\n", worst, o.seeds, opts.tolerance,
                    ok ? "PASS" : "FAIL");
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Knowledge-graph and semantic ad recommender"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--config", o.config, "flat key = value config file");
    app.add_option("--seed", o.seed, "override every stage seed");
    app.add_option("--out", o.out, "work directory shared by the stages");
    app.add_flag("--json", o.json, "machine-readable output");

    auto* gen = app.add_subcommand("gen-data", "generate the synthetic dataset bundle");
    gen->add_flag("--dump-latent", o.dump_latent, "also write latent topic state for the oracle ranker");
    app.add_subcommand("build-kg", "split users and build the training graph");
    app.add_subcommand("train", "train the model, write snapshot and loss curve");
    auto* ix = app.add_subcommand("index", "index the ads' fused vectors");
    ix->add_option("--index-kind", o.index_kind, "hnsw|ivf|exact");
    auto* q = app.add_subcommand("query", "top-k ads for a user id or a raw vector");
    q->add_option("--user", o.user, "user entity id");
    q->add_option("--vector", o.vector, "comma-separated query vector");
    q->add_option("--k", o.k, "results to return")->check(CLI::PositiveNumber);
    q->add_option("--ef-search", o.ef_search, "HNSW beam width");
    q->add_option("--nprobe", o.nprobe, "IVF lists to scan");
    auto* ev = app.add_subcommand("eval", "evaluate the model and baselines on test users");
    ev->add_option("--ef-search", o.ef_search, "HNSW beam width");
    ev->add_option("--nprobe", o.nprobe, "IVF lists to scan");
    auto* gc = app.add_subcommand("gradcheck", "finite-difference check of the analytic gradients");
    gc->add_option("--seeds", o.seeds, "number of random tiny problems")->check(CLI::PositiveNumber);

    // Global options are accepted after the subcommand too.
    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        const std::string cmd = app.get_subcommands().front()->get_name();
        if (cmd == "gen-data") return cmd_gen_data(o);
        if (cmd == "build-kg") return cmd_build_kg(o);
        if (cmd == "train") return cmd_train(o);
        if (cmd == "index") return cmd_index(o);
        if (cmd == "query") return cmd_query(o);
        if (cmd == "eval") return cmd_eval(o);
        if (cmd == "gradcheck") return cmd_gradcheck(o);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::string msg = e.what();
        for (auto& ch : msg)
            if (ch == '\n') ch = ' ';
        std::fprintf(stderr, "error: Internal: %s\n", msg.c_str());
        return 3;
    }
    return 0;
}
