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


// One PASS/FAIL line per acceptance criterion, followed by diagnostics.
// Criteria 5, 6 and 8 share the full pipeline runs.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kgsr/error.hpp"
#include "kgsr/eval/metrics.hpp"
#include "kgsr/index/latency.hpp"
#include "kgsr/io/binary.hpp"
#include "kgsr/pipeline/pipeline.hpp"
#include "kgsr/train/gradcheck.hpp"
#include "naive_metrics.hpp"

using namespace kgsr;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Outcome {
    bool pass = false;
    std::string summary;
    std::vector<std::string> notes;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// ---------------------------------------------------------------- 1

Outcome gradient_fidelity() {
    const auto start = Clock::now();
    train::GradCheckOptions opts;
    opts.epsilon = 1e-5;
    opts.tolerance = 1e-4;
    constexpr int kSeeds = 25;
    double worst = 0.0;
    bool ok = true;
    std::size_t max_nodes = 0, max_clicks = 0, coords = 0;
    std::map<std::string, double> per_block;
    for (int s = 0; s < kSeeds; ++s) {
        const auto p = train::make_tiny_problem(static_cast<std::uint64_t>(s));
        max_nodes = std::max(max_nodes, p.graph.entity_count());
        max_clicks = std::max(max_clicks, p.batch.clicks.size());
        const auto r = train::check_tiny_problem(static_cast<std::uint64_t>(s), opts);
        ok = ok && r.passed;
        worst = std::max(worst, r.max_rel_error);
        for (const auto& b : r.blocks) {
            per_block[b.name] = std::max(per_block[b.name], b.max_rel_error);
            coords += b.checked;
        }
    }
    const double secs = seconds_since(start);
    const auto dims = train::make_tiny_problem(0).model.dims();
    Outcome o;
    const bool small = dims.kg_dim <= 4 && max_nodes <= 10 && max_clicks <= 16;
    o.pass = ok && worst < 1e-4 && small && secs < 60.0;
    o.summary = fmt("max rel error %.2e < 1e-4 over %d seeds, %zu coordinates, %.1fs", worst, kSeeds, coords, secs);
    o.notes.push_back(fmt("tiny model: d=%d, up to %zu nodes, up to %zu clicks per batch", dims.kg_dim, max_nodes,
                          max_clicks));
    std::string blocks = "per block:";
    for (const auto& [name, err] : per_block) blocks += fmt(" %s=%.1e", name.c_str(), err);
    o.notes.push_back(blocks);
    return o;
}

// ---------------------------------------------------------------- 2

Outcome metric_oracle() {
    const auto start = Clock::now();
    Rng rng(2024);
    std::vector<std::uint32_t> pool(60);
    std::iota(pool.begin(), pool.end(), 1000u);
    std::uniform_int_distribution<int> len(0, 40), tlen(1, 15);
    double worst = 0.0;
    std::vector<eval::RankedList> lists;
    std::vector<eval::GroundTruth> truths;
    double rr_sum = 0.0;
    for (int i = 0; i < 1000; ++i) {
        std::shuffle(pool.begin(), pool.end(), rng);
        eval::RankedList ranked(pool.begin(), pool.begin() + len(rng));
        std::shuffle(pool.begin(), pool.end(), rng);
        const auto truth = eval::make_truth({pool.begin(), pool.begin() + tlen(rng)});
        for (int k : {1, 2, 5, 10, 20}) {
            const auto n = kgsr::testing::naive_metrics(ranked, truth, k);
            worst = std::max({worst, std::abs(eval::precision_at_k(ranked, truth, k) - n.precision),
                              std::abs(eval::recall_at_k(ranked, truth, k) - n.recall),
                              std::abs(eval::ndcg_at_k(ranked, truth, k) - n.ndcg),
                              std::abs(eval::reciprocal_rank(ranked, truth) - n.rr)});
        }
        rr_sum += kgsr::testing::naive_metrics(ranked, truth, 1).rr;
        lists.push_back(std::move(ranked));
        truths.push_back(truth);
    }
    worst = std::max(worst, std::abs(eval::mrr(lists, truths) - rr_sum / 1000.0));

    const auto t = eval::make_truth({1});
    const eval::RankedList r = {2, 1};
    const double p2 = eval::precision_at_k(r, t, 2), r2 = eval::recall_at_k(r, t, 2), n2 = eval::ndcg_at_k(r, t, 2);
    const bool hand = p2 == 0.5 && r2 == 1.0 && std::abs(n2 - 0.63093) < 5e-6;

    Outcome o;
    o.pass = worst < 1e-12 && hand;
    o.summary = fmt("max |fast - naive| = %.1e over 1000 fixtures; P@2=%.2f R@2=%.2f NDCG@2=%.5f; %.2fs", worst, p2, r2,
                    n2, seconds_since(start));
    return o;
}

// ---------------------------------------------------------------- 3, 4

index::VectorStore gaussian_store(std::size_t n, int dim, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> g;
    Matrix v(static_cast<Eigen::Index>(n), dim);
    for (Eigen::Index i = 0; i < v.rows(); ++i)
        for (int j = 0; j < dim; ++j) v(i, j) = g(rng);
    std::vector<std::uint32_t> ids(n);
    std::iota(ids.begin(), ids.end(), 0u);
    return index::VectorStore::make(std::move(ids), std::move(v));
}

std::vector<std::vector<double>> gaussian_queries(std::size_t n, int dim, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> g;
    std::vector<std::vector<double>> out(n, std::vector<double>(static_cast<std::size_t>(dim)));
    for (auto& q : out)
        for (auto& x : q) x = g(rng);
    return out;
}

struct AnnFixture {
    index::VectorStore store;
    std::vector<std::vector<double>> queries;
    std::vector<index::QueryResult> truth;
    std::optional<index::HnswIndex> hnsw;
    std::optional<index::IvfIndex> ivf;
};

double mean_recall(const std::vector<std::vector<double>>& qs, const std::vector<index::QueryResult>& truth,
                   const std::function<index::QueryResult(const std::vector<double>&)>& search) {
    double s = 0.0;
    for (std::size_t i = 0; i < qs.size(); ++i) s += index::recall(search(qs[i]), truth[i]);
    return s / static_cast<double>(qs.size());
}

Outcome ann_recall(AnnFixture& f) {
    const auto start = Clock::now();
    f.store = gaussian_store(10000, 64, 7);
    f.queries = gaussian_queries(100, 64, 8);
    for (const auto& q : f.queries) f.truth.push_back(index::exact_search(f.store, q, 10));

    auto t = Clock::now();
    f.hnsw = index::HnswIndex::build(f.store, {16, 200, 42});
    const double hnsw_build = seconds_since(t);
    t = Clock::now();
    f.ivf = index::IvfIndex::build(f.store, {64, 20, 42});
    const double ivf_build = seconds_since(t);

    const double hnsw_recall = mean_recall(f.queries, f.truth, [&](const auto& q) { return f.hnsw->search(q, 10, 64); });
    const double ivf_recall = mean_recall(f.queries, f.truth, [&](const auto& q) { return f.ivf->search(q, 10, 8); });

    bool full_probe = true, single_list = true;
    const auto one = index::IvfIndex::build(f.store, {1, 5, 42});
    for (std::size_t i = 0; i < f.queries.size(); ++i) {
        full_probe = full_probe && f.ivf->search(f.queries[i], 10, 64) == f.truth[i];
        single_list = single_list && one.search(f.queries[i], 10, 1) == f.truth[i];
    }

    std::vector<double> ladder;
    for (int ef : {16, 32, 64, 128})
        ladder.push_back(mean_recall(f.queries, f.truth, [&](const auto& q) { return f.hnsw->search(q, 10, ef); }));
    const bool monotone = std::is_sorted(ladder.begin(), ladder.end());

    int self_hits = 0;
    for (std::uint32_t i = 0; i < 100; ++i) {
        const auto* row = f.store.row(i * 97);
        const auto r = f.hnsw->search({row, 64}, 10, 64);
        self_hits += !r.empty() && r.front().id == i * 97;
    }

    Outcome o;
    o.pass = hnsw_recall >= 0.95 && ivf_recall >= 0.90 && full_probe && single_list;
    o.summary = fmt("HNSW recall@10 %.3f (need 0.95), IVF recall@10 %.3f (need 0.90), nprobe=nlist exact: %s, "
                    "nlist=1 exact: %s; %.1fs",
                    hnsw_recall, ivf_recall, full_probe ? "yes" : "no", single_list ? "yes" : "no", seconds_since(start));
    o.notes.push_back(fmt("build: HNSW %.1fs (%zu repair links), IVF %.1fs", hnsw_build, f.hnsw->repaired_links(),
                          ivf_build));
    o.notes.push_back(fmt("HNSW recall over ef 16/32/64/128: %.3f %.3f %.3f %.3f (monotone: %s)", ladder[0], ladder[1],
                          ladder[2], ladder[3], monotone ? "yes" : "no"));
    o.notes.push_back(fmt("stored-vector self hit at ef=64: %d/100", self_hits));
    for (int np : {16, 32})
        o.notes.push_back(fmt("IVF nprobe=%d recall@10 %.3f", np,
                              mean_recall(f.queries, f.truth, [&](const auto& q) { return f.ivf->search(q, 10, np); })));
    return o;
}

Outcome retrieval_speed() {
    const auto start = Clock::now();
    const auto store = gaussian_store(100000, 64, 11);
    const auto queries = gaussian_queries(200, 64, 12);

    index::LatencyMonitor exact_lat(0.0);
    std::vector<index::QueryResult> truth;
    for (const auto& q : queries) truth.push_back(index::timed(exact_lat, [&] { return index::exact_search(store, q, 10); }));
    const auto exact = exact_lat.report();

    auto t = Clock::now();
    const auto hnsw = index::HnswIndex::build(store, {16, 200, 42});
    const double build = seconds_since(t);

    Outcome o;
    std::optional<int> matched;
    index::LatencyReport at_match;
    // Past 512 the ladder only continues until recall is matched, so the
    // comparison is always made at recall >= 0.95.
    for (int ef : {64, 128, 256, 512, 1024, 2048, 4096}) {
        if (matched) break;
        index::LatencyMonitor lat(exact.avg_us);
        double r = 0.0;
        for (std::size_t i = 0; i < queries.size(); ++i)
            r += index::recall(index::timed(lat, [&] { return hnsw.search(queries[i], 10, ef); }), truth[i]);
        r /= static_cast<double>(queries.size());
        const auto rep = lat.report();
        o.notes.push_back(fmt("ef=%d recall@10 %.3f, mean %.0f us (exact %.0f us), ratio %.3f", ef, r, rep.avg_us,
                              exact.avg_us, rep.avg_us / exact.avg_us));
        if (r >= 0.95 && !matched) {
            matched = ef;
            at_match = rep;
        }
    }

    // The threshold test is strict: a mean equal to the threshold is not within it.
    index::LatencyMonitor edge(20.0);
    for (int us : {10, 20, 30}) edge.record_us(us);
    index::LatencyMonitor above(20.5);
    for (int us : {10, 20, 30}) above.record_us(us);
    const bool threshold_ok = !edge.report().within_threshold && above.report().within_threshold &&
                              edge.report().avg_us == 20.0;

    const bool faster = matched && at_match.avg_us < 0.5 * exact.avg_us;
    o.pass = faster && threshold_ok;
    if (matched) {
        o.summary = fmt("at ef=%d (first with recall >= 0.95) HNSW mean %.0f us vs exact %.0f us, ratio %.3f (need < 0.5); "
                        "within_threshold strict: %s; %.0fs",
                        *matched, at_match.avg_us, exact.avg_us, at_match.avg_us / exact.avg_us,
                        threshold_ok ? "yes" : "no", seconds_since(start));
    } else {
        o.summary = fmt("no ef up to 4096 reached recall 0.95 at N=100000; within_threshold strict: %s; %.0fs",
                        threshold_ok ? "yes" : "no", seconds_since(start));
    }
    o.notes.insert(o.notes.begin(), fmt("HNSW build over 100000 vectors: %.0fs", build));
    return o;
}

// ---------------------------------------------------------------- pipeline

struct PipelineRun {
    pipeline::WorkDir dir;
    pipeline::Workspace ws;
    std::vector<double> train_curve, test_curve;
    double initial_train = 0.0;
    std::optional<std::string> failure;
    double train_secs = 0.0, total_secs = 0.0;
    pipeline::EvalSummary summary;
    std::string loss_csv, model_bytes, metrics_lines;
    std::vector<std::string> fingerprints;
};

PipelineRun run_pipeline(const pipeline::PipelineConfig& c, const std::string& root, bool verbose) {
    PipelineRun run{pipeline::WorkDir{root}, {}, {}, {}, 0.0, std::nullopt, 0.0, 0.0, {}, {}, {}, {}, {}};
    fs::remove_all(root);
    const auto start = Clock::now();
    try {
        datagen::write_bundle(datagen::generate(c.gen), c.gen, run.dir.data(), true);
        run.ws = pipeline::prepare(pipeline::load_corpus(run.dir.data()), c);
        pipeline::save_graph(run.dir, run.ws);

        const auto t = Clock::now();
        const auto result = train::train(c.train, run.ws.train_data(), [&](int epoch, double tr, double te) {
            if (verbose) std::printf("    epoch %2d  train %.4f  test %.4f  (%.0fs)\n", epoch, tr, te, seconds_since(t));
            std::fflush(stdout);
        });
        run.train_secs = seconds_since(t);
        run.train_curve = result.curve.train;
        run.test_curve = result.curve.test;
        run.initial_train = result.initial_train_loss;
        model::save_model(run.dir.model(), result.model);
        run.loss_csv = result.curve.to_csv();
        {
            std::ofstream(run.dir.loss_csv(), std::ios::binary) << run.loss_csv;
        }
        run.model_bytes = slurp(run.dir.model());

        const auto m = model::load_model(run.dir.model());
        index::save_index(run.dir.index(), pipeline::build_index(pipeline::ad_store(m, run.ws), c.index));
        const auto idx = index::load_index(run.dir.index());
        run.summary = pipeline::evaluate_all(run.ws, m, idx, c, datagen::load_latent(datagen::BundlePaths::in(run.dir.data()).latent));
        run.metrics_lines = pipeline::summary_json_lines(run.summary);
        {
            std::ofstream(run.dir.metrics(), std::ios::binary) << run.metrics_lines;
        }
        run.fingerprints.push_back(run.summary.model.raw.ranking_fingerprint());
        run.fingerprints.push_back(run.summary.model.reranked.ranking_fingerprint());
        for (const auto& b : run.summary.baselines) run.fingerprints.push_back(b.name + b.report.ranking_fingerprint());
    } catch (const Error& e) {
        run.failure = e.what();
    }
    run.total_secs = seconds_since(start);
    return run;
}

Outcome learning_signal(const PipelineRun& run) {
    Outcome o;
    if (run.failure && run.train_curve.empty()) {
        o.summary = "pipeline failed before training finished: " + *run.failure;
        return o;
    }
    const double tr1 = run.train_curve.front(), trN = run.train_curve.back();
    const double te1 = run.test_curve.front(), teN = run.test_curve.back();
    bool finite = true;
    for (const auto* c : {&run.train_curve, &run.test_curve})
        for (double x : *c) finite = finite && std::isfinite(x);
    o.pass = trN < 0.5 * tr1 && teN < te1 && finite && !run.failure && run.train_secs < 600.0;
    o.summary = fmt("train %.4f -> %.4f (need < %.4f), test %.4f -> %.4f, %zu epochs, no divergence: %s, %.0fs", tr1, trN,
                    0.5 * tr1, te1, teN, run.train_curve.size(), run.failure ? "no" : "yes", run.train_secs);
    o.notes.push_back(fmt("loss before the first step: %.4f", run.initial_train));
    o.notes.push_back(fmt("final |train - test| = %.4f vs 0.5 x test = %.4f (%s); test users are cold, train users "
                          "keep their click edges in the graph",
                          std::abs(trN - teN), 0.5 * teN, std::abs(trN - teN) <= 0.5 * teN ? "within" : "exceeded"));
    return o;
}

const eval::MetricsReport* baseline(const pipeline::EvalSummary& s, const std::string& name) {
    for (const auto& b : s.baselines)
        if (b.name == name) return &b.report;
    return nullptr;
}

Outcome effectiveness(const PipelineRun& run) {
    Outcome o;
    const auto* pop = baseline(run.summary, "popularity");
    const auto* rnd = baseline(run.summary, "random");
    const auto* orc = baseline(run.summary, "bayes_oracle");
    if (run.failure || !pop || !rnd || !orc) {
        o.summary = "pipeline did not finish: " + run.failure.value_or("missing baseline");
        return o;
    }
    const double m = run.summary.model.reranked.ndcg_at_10;
    o.pass = m >= 1.2 * pop->ndcg_at_10 && m >= 5.0 * rnd->ndcg_at_10 && orc->ndcg_at_10 >= 0.8 &&
             run.total_secs < 900.0;
    o.summary = fmt("model NDCG@10 %.4f vs popularity %.4f (x%.2f, need 1.2), random %.4f (x%.1f, need 5), "
                    "oracle %.4f (need 0.8); pipeline %.0fs",
                    m, pop->ndcg_at_10, m / pop->ndcg_at_10, rnd->ndcg_at_10, m / rnd->ndcg_at_10, orc->ndcg_at_10,
                    run.total_secs);
    o.notes.push_back(fmt("index order before reranking: NDCG@10 %.4f", run.summary.model.raw.ndcg_at_10));
    std::istringstream table(pipeline::summary_table(run.summary));
    for (std::string line; std::getline(table, line);) o.notes.push_back(line);
    const auto& l = run.summary.model.latency;
    o.notes.push_back(fmt("latency: avg %.0f us, p95 %.0f us over %zu queries", l.avg_us, l.p95_us, l.count));
    return o;
}

Outcome audits(const AnnFixture& ann, const PipelineRun& run) {
    const auto start = Clock::now();
    Outcome o;
    std::vector<std::string> problems;

    if (!ann.hnsw) {
        problems.push_back("ANN fixture missing");
    } else {
        if (auto a = ann.hnsw->audit(); !a.ok()) problems.push_back("HNSW audit: " + a.violations.front());
        for (const index::VectorIndex idx : {index::VectorIndex(*ann.hnsw), index::VectorIndex(*ann.ivf),
                                             index::VectorIndex(ann.store)}) {
            const auto bytes = index::encode_index(idx);
            const auto back = index::decode_index(bytes);
            if (!back.audit().ok()) problems.push_back("audit failed after load");
            if (index::encode_index(back) != bytes) problems.push_back("re-encoding changed bytes");
            for (const auto& q : ann.queries)
                if (idx.search(q, 10) != back.search(q, 10)) {
                    problems.push_back(std::string(index::to_string(idx.kind())) + " results changed after round trip");
                    break;
                }
        }
    }

    std::size_t rows = 0;
    if (run.failure) {
        problems.push_back("pipeline failed: " + *run.failure);
    } else {
        try {
            const auto p = datagen::BundlePaths::in(run.dir.data());
            const auto manifest = nlohmann::json::parse(slurp(p.manifest));
            const std::map<std::string, std::string> files = {{"entities", p.entities}, {"triples", p.triples},
                                                              {"interactions", p.interactions},
                                                              {"ad_texts", p.ad_texts}, {"user_tags", p.user_tags}};
            for (const auto& [name, path] : files) {
                const auto body = slurp(path);
                if (manifest["checksums"][name].get<std::uint32_t>() !=
                    io::crc32({reinterpret_cast<const std::uint8_t*>(body.data()), body.size()}))
                    problems.push_back(name + " checksum mismatch");
            }
            const auto corpus = pipeline::load_corpus(run.dir.data());
            rows = corpus.entities.size() + corpus.triples.size() + corpus.interactions.size() +
                   corpus.ad_texts.size() + corpus.user_tags.size();
            kg::KnowledgeGraph::build(corpus.entities, corpus.triples);
            kg::load_entities(run.dir.graph_dir() + "/entities.tsv");
            datagen::load_latent(p.latent);
            const auto idx = index::load_index(run.dir.index());
            if (auto a = idx.audit(); !a.ok()) problems.push_back("pipeline index audit: " + a.violations.front());
            model::load_model(run.dir.model());
            std::istringstream in(run.metrics_lines);
            for (std::string line; std::getline(in, line);)
                if (!nlohmann::json::parse(line).is_object()) problems.push_back("metrics line is not an object");
        } catch (const std::exception& e) {
            problems.push_back(std::string("re-parse: ") + e.what());
        }
        if (const auto leaked = eval::leaked_users(run.ws.split); !leaked.empty())
            problems.push_back(fmt("%zu leaked users", leaked.size()));
        try {
            eval::audit_graph_leakage(run.ws.graph, run.ws.split.train_users);
        } catch (const Error& e) {
            problems.push_back(e.what());
        }
    }
    o.pass = problems.empty();
    o.summary = o.pass ? fmt("HNSW audit ok, 3 index kinds round-trip over 100 queries, %zu rows re-parsed, 0 leaked "
                             "users; %.1fs",
                             rows, seconds_since(start))
                       : problems.front();
    for (std::size_t i = 1; i < problems.size(); ++i) o.notes.push_back(problems[i]);
    return o;
}

Outcome determinism(const PipelineRun& a, const PipelineRun& b) {
    Outcome o;
    if (a.failure || b.failure) {
        o.summary = "a pipeline run failed: " + a.failure.value_or(b.failure.value_or(""));
        return o;
    }
    const bool loss = a.loss_csv == b.loss_csv && slurp(a.dir.loss_csv()) == slurp(b.dir.loss_csv());
    const bool model = a.model_bytes == b.model_bytes;
    const bool metrics = a.fingerprints == b.fingerprints;
    const bool index = slurp(a.dir.index()) == slurp(b.dir.index());
    o.pass = loss && model && metrics;
    o.summary = fmt("loss CSV identical: %s, model snapshot identical: %s (%zu bytes), metrics identical: %s",
                    loss ? "yes" : "no", model ? "yes" : "no", a.model_bytes.size(), metrics ? "yes" : "no");
    o.notes.push_back(fmt("index snapshot identical: %s; arl_ms is wall-clock and excluded", index ? "yes" : "no"));
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance checks"};
    std::string config = KGSR_SOURCE_DIR "/configs/default.conf";
    std::string work = (fs::temp_directory_path() / "kgsr_acceptance").string();
    std::vector<int> only;
    bool quiet = false;
    app.add_option("--config", config, "pipeline config for criteria 5-8");
    app.add_option("--work", work, "scratch directory for pipeline runs");
    app.add_option("--only", only, "run just these criteria")->delimiter(',');
    app.add_flag("--quiet", quiet, "no per-epoch output");
    CLI11_PARSE(app, argc, argv);

    auto wanted = [&](int n) { return only.empty() || std::count(only.begin(), only.end(), n) > 0; };
    static const char* titles[] = {"",
                                   "gradient fidelity",
                                   "metric oracle equivalence",
                                   "ANN recall",
                                   "retrieval speed",
                                   "learning signal",
                                   "end-to-end effectiveness",
                                   "structural and format audits",
                                   "determinism"};
    std::map<int, Outcome> results;
    auto record = [&](int n, Outcome o) {
        std::printf("criterion %d %-29s %s  %s\n", n, titles[n], o.pass ? "PASS" : "FAIL", o.summary.c_str());
        for (const auto& note : o.notes) std::printf("    %s\n", note.c_str());
        std::fflush(stdout);
        results[n] = std::move(o);
    };
    auto guarded = [&](int n, const std::function<Outcome()>& fn) {
        if (!wanted(n)) return;
        try {
            record(n, fn());
        } catch (const std::exception& e) {
            record(n, Outcome{false, std::string("threw: ") + e.what(), {}});
        }
    };

    guarded(1, gradient_fidelity);
    guarded(2, metric_oracle);
    AnnFixture ann;
    guarded(3, [&] { return ann_recall(ann); });
    guarded(4, retrieval_speed);

    const bool need_pipeline = wanted(5) || wanted(6) || wanted(7) || wanted(8);
    std::optional<PipelineRun> first, second;
    if (need_pipeline) {
        const auto c = pipeline::PipelineConfig::load(config);
        std::printf("pipeline run 1 on %s\n", config.c_str());
        std::fflush(stdout);
        first = run_pipeline(c, work + "/run1", !quiet);
        guarded(5, [&] { return learning_signal(*first); });
        guarded(6, [&] { return effectiveness(*first); });
        if (wanted(7)) {
            if (!ann.hnsw) {
                ann.store = gaussian_store(10000, 64, 7);
                ann.queries = gaussian_queries(100, 64, 8);
                ann.hnsw = index::HnswIndex::build(ann.store, {16, 200, 42});
                ann.ivf = index::IvfIndex::build(ann.store, {64, 20, 42});
            }
            guarded(7, [&] { return audits(ann, *first); });
        }
        if (wanted(8)) {
            std::printf("pipeline run 2 (same seeds)\n");
            std::fflush(stdout);
            second = run_pipeline(c, work + "/run2", false);
            guarded(8, [&] { return determinism(*first, *second); });
        }
    }

    std::printf("\nsummary\n");
    int failed = 0;
    for (const auto& [n, o] : results) {
        std::printf("  criterion %d %-29s %s\n", n, titles[n], o.pass ? "PASS" : "FAIL");
        failed += !o.pass;
    }
    std::printf("%zu criteria run, %d failed\n", results.size(), failed);
    return failed == 0 ? 0 : 1;
}
