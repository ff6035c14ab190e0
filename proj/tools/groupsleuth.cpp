#include <filesystem>
#include <fstream>
#include <map>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "groupsleuth/checkpoint.hpp"
#include "groupsleuth/pipeline.hpp"

namespace fs = std::filesystem;
using namespace groupsleuth;

namespace {

struct Options {
    std::string run_dir = "run";
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> strategy;
    std::optional<double> tau;
    std::optional<int> windows;
};

void add_common(CLI::App* cmd, Options& opt) {
    cmd->add_option("--run-dir", opt.run_dir, "Run directory for stage artifacts");
    cmd->add_option("--config", opt.config_path, "key = value config file");
    cmd->add_option("--seed", opt.seed, "Master RNG seed (overrides config)");
    cmd->add_option("--strategy", opt.strategy,
                    "Outlier removal strategy (kmeans, kmedians, gmm_mahalanobis, "
                    "centroid_threshold, min_connection)");
    cmd->add_option("--tau", opt.tau, "Co-review cosine threshold");
    cmd->add_option("--windows", opt.windows, "Synthetic corpus window count");
}

PipelineConfig make_config(const Options& opt) {
    PipelineConfig cfg;
    if (!opt.config_path.empty()) cfg = load_config(opt.config_path);
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.strategy) cfg.strategy = parse_strategy(*opt.strategy);
    if (opt.tau) cfg.tau = *opt.tau;
    if (opt.windows) cfg.synth.n_windows = *opt.windows;
    return cfg;
}

struct RunDir {
    fs::path root;

    explicit RunDir(const std::string& dir) : root(dir) { fs::create_directories(root); }

    std::string stage_file(const std::string& stage, const std::string& name) const {
        fs::create_directories(root / stage);
        return (root / stage / name).string();
    }

    std::string require(const std::string& stage, const std::string& name,
                        const std::string& desc, const std::string& producer) const {
        fs::path p = root / stage / name;
        if (!fs::exists(p))
            throw std::runtime_error("missing artifact: " + desc + " (run " + producer + ")");
        return p.string();
    }
};

// One subcommand per run directory at a time.
struct Lock {
    fs::path path;

    explicit Lock(const RunDir& rd) : path(rd.root / ".lock") {
        if (fs::exists(path))
            throw std::runtime_error("run directory is locked by another invocation (" +
                                     path.string() + " exists)");
        std::ofstream f(path);
        if (!f) throw std::runtime_error("cannot create lock file " + path.string());
    }
    ~Lock() {
        std::error_code ec;
        fs::remove(path, ec);
    }
};

Corpus load_run_corpus(const RunDir& rd) {
    return load_corpus(rd.require("synth", "corpus.tsv", "corpus", "synth"));
}

void load_embed_artifacts(PipelineState& st, const RunDir& rd) {
    st.embeddings = load_embeddings(rd.require("embed", "embeddings.txt", "embeddings", "embed"));
    auto vecs = load_reviewer_vectors(
        rd.require("embed", "reviewer_vectors.tsv", "reviewer vectors", "embed"));
    st.reviewer_vecs.assign(std::size_t(st.corpus.n_reviewers()), {});
    for (auto& v : vecs) {
        auto it = st.corpus.reviewer_index.find(v.reviewer_id);
        if (it == st.corpus.reviewer_index.end())
            throw std::runtime_error("reviewer vectors do not match the corpus: " + v.reviewer_id);
        st.reviewer_vecs[std::size_t(it->second)] = std::move(v);
    }
}

void load_group_artifacts(PipelineState& st, const RunDir& rd) {
    st.graphs = load_graphs(st.corpus, rd.require("group", "graphs.tsv", "co-review graphs", "group"));
    st.groups = load_group_timelines(st.corpus, rd.require("group", "groups.tsv", "candidate groups", "group"));
    derive_group_split(st);
}

void load_spatial_model(PipelineState& st, const RunDir& rd) {
    auto ck = Checkpoint::load(
        rd.require("spatial", "model.ckpt", "spatial model checkpoint", "spatial-train"));
    st.spatial_model = HinRnnModel(st.cfg.m_max, st.cfg.cbow.dim + 1);
    checkpoint_get(ck, "hinrnn", st.spatial_model);
    st.spatial_model.trained = true;
}

void load_refined(PipelineState& st, const RunDir& rd) {
    st.refined = load_group_timelines(
        st.corpus, rd.require("spatial", "refined.tsv", "refined timelines", "spatial-refine"));
}

void load_temporal_model(PipelineState& st, const RunDir& rd) {
    auto ck = Checkpoint::load(
        rd.require("temporal", "model.ckpt", "temporal model checkpoint", "temporal-train"));
    st.temporal_model = TemporalModel(st.cfg.m_max, st.cfg.temporal.hidden);
    checkpoint_get(ck, "temporal", st.temporal_model);
    st.temporal_model.trained = true;
}

void load_forecast_artifacts(PipelineState& st, const RunDir& rd) {
    st.forecasts = load_forecasts(
        st.groups, rd.require("forecast", "forecast.tsv", "collaboration forecast", "forecast"));
}

void load_gcn_model(PipelineState& st, const RunDir& rd) {
    auto ck = Checkpoint::load(
        rd.require("gcn", "model.ckpt", "gcn model checkpoint", "gcn-train"));
    st.gcn_model = GcnModel(std::size_t(st.cfg.cbow.dim + 1), st.cfg.gcn.hidden);
    checkpoint_get(ck, "gcn", st.gcn_model);
}

void load_hidden(PipelineState& st, const RunDir& rd) {
    st.hidden_reps = load_hidden_reps(
        st.groups, rd.require("gcn", "refined_reps.tsv", "refined reps", "gcn-refine"));
}

// --- subcommand bodies (also reused by run-all) ---

void do_synth(const RunDir& rd, const PipelineConfig& cfg) {
    auto result = generate_synthetic(cfg.synth, cfg.seed);
    write_corpus(result.corpus, rd.stage_file("synth", "corpus.tsv"));
    write_ground_truth(result.truth, rd.stage_file("synth", "groundtruth.tsv"));
    std::cout << "synth: " << result.corpus.reviews.size() << " reviews, "
              << result.corpus.n_reviewers() << " reviewers, " << result.truth.groups.size()
              << " planted groups\n";
}

void do_embed(PipelineState& st, const RunDir& rd) {
    stage_embed(st);
    save_embeddings(st.embeddings, rd.stage_file("embed", "embeddings.txt"));
    write_reviewer_vectors(st.reviewer_vecs, rd.stage_file("embed", "reviewer_vectors.tsv"));
    std::cout << "embed: vocabulary " << st.embeddings.vocab.size() << ", dim "
              << st.embeddings.dim() << "\n";
}

void do_group(PipelineState& st, const RunDir& rd) {
    stage_group(st);
    save_graphs(st.graphs, st.corpus, rd.stage_file("group", "graphs.tsv"));
    save_group_timelines(st.groups, st.corpus, rd.stage_file("group", "groups.tsv"));
    std::cout << "group: " << st.graphs.size() << " windows, " << st.groups.size()
              << " candidate groups\n";
}

void do_spatial_train(PipelineState& st, const RunDir& rd) {
    stage_spatial_train(st);
    Checkpoint ck;
    checkpoint_put(ck, "hinrnn", st.spatial_model);
    ck.save(rd.stage_file("spatial", "model.ckpt"));
    std::cout << "spatial-train: model saved\n";
}

void do_spatial_refine(PipelineState& st, const RunDir& rd) {
    stage_spatial_refine(st);
    save_group_timelines(st.refined, st.corpus, rd.stage_file("spatial", "refined.tsv"));
    std::cout << "spatial-refine: " << st.refined.size() << " timelines refined\n";
}

void do_temporal_train(PipelineState& st, const RunDir& rd) {
    stage_temporal_train(st);
    Checkpoint ck;
    checkpoint_put(ck, "temporal", st.temporal_model);
    ck.save(rd.stage_file("temporal", "model.ckpt"));
    std::cout << "temporal-train: model saved\n";
}

void do_forecast(PipelineState& st, const RunDir& rd) {
    stage_forecast(st);
    save_forecasts(st.forecasts, st.groups, rd.stage_file("forecast", "forecast.tsv"));
    std::cout << "forecast: " << st.forecasts.size() << " groups forecast\n";
}

void do_gcn_train(PipelineState& st, const RunDir& rd) {
    stage_gcn_train(st);
    Checkpoint ck;
    checkpoint_put(ck, "gcn", st.gcn_model);
    ck.save(rd.stage_file("gcn", "model.ckpt"));
    std::cout << "gcn-train: model saved\n";
}

void do_gcn_refine(PipelineState& st, const RunDir& rd) {
    stage_gcn_refine(st);
    save_hidden_reps(st.hidden_reps, st.groups, st.corpus,
                     rd.stage_file("gcn", "refined_reps.tsv"));
    std::cout << "gcn-refine: representations saved\n";
}

void do_classify(PipelineState& st, const RunDir& rd) {
    stage_classify(st, AblationMode::full);
    save_verdicts(st.verdicts, st.groups, st.corpus, st.test_groups,
                  rd.stage_file("classify", "verdicts.tsv"));
    std::cout << "classify: " << st.verdicts.size() << " verdicts\n";
}

void do_eval(PipelineState& st, const RunDir& rd) {
    auto [verdicts, is_test] =
        load_verdicts(rd.require("classify", "verdicts.tsv", "verdicts", "classify"));
    std::map<std::string, int> by_id;
    for (int gi = 0; gi < int(st.groups.size()); ++gi) by_id[st.groups[std::size_t(gi)].group_id] = gi;
    std::vector<int> pred, truth;
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
        if (!is_test[i]) continue;
        auto it = by_id.find(verdicts[i].group_id);
        if (it == by_id.end())
            throw std::runtime_error("verdicts do not match groups: " + verdicts[i].group_id);
        pred.push_back(verdicts[i].fraud ? 1 : 0);
        truth.push_back(st.group_labels[std::size_t(it->second)]);
    }
    AblationRow row{"full", compute_metrics(pred, truth), {}};
    save_metrics({row}, rd.stage_file("eval", "metrics.tsv"));
    std::cout << "eval: precision " << row.metrics.precision << " recall " << row.metrics.recall
              << " f1 " << row.metrics.f1 << "\n";
}

void do_ablate(const Corpus& corpus, const PipelineConfig& cfg, const RunDir& rd) {
    auto rows = run_ablation(corpus, cfg);
    save_metrics(rows, rd.stage_file("ablate", "ablation.tsv"));
    for (const auto& r : rows)
        std::cout << "ablate: " << r.config << " f1 " << r.metrics.f1 << "\n";
}

void do_report(PipelineState& st, const RunDir& rd) {
    auto truth =
        load_ground_truth(rd.require("synth", "groundtruth.tsv", "ground truth", "synth"));
    auto labels = derive_reviewer_labels(st.corpus);
    auto rows = interaction_report(st.corpus, st.graphs, truth, labels);
    write_interaction_report(rows, rd.stage_file("report", "interactions.tsv"));
    std::cout << "report: " << rows.size() << " windows\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spatio-temporal fraudster group detection pipeline"};
    app.require_subcommand(1);
    Options opt;

    std::string chosen;
    for (const char* name :
         {"synth", "embed", "group", "spatial-train", "spatial-refine", "temporal-train",
          "forecast", "gcn-train", "gcn-refine", "classify", "eval", "ablate", "report",
          "run-all"}) {
        auto* cmd = app.add_subcommand(name);
        add_common(cmd, opt);
        cmd->callback([&chosen, name] { chosen = name; });
    }

    CLI11_PARSE(app, argc, argv);

    try {
        PipelineConfig cfg = make_config(opt);
        RunDir rd(opt.run_dir);
        Lock lock(rd);

        if (chosen == "synth") {
            do_synth(rd, cfg);
            return 0;
        }
        if (chosen == "run-all") {
            do_synth(rd, cfg);
            PipelineState st;
            st.cfg = cfg;
            st.corpus = load_run_corpus(rd);
            do_embed(st, rd);
            do_group(st, rd);
            do_spatial_train(st, rd);
            do_spatial_refine(st, rd);
            do_temporal_train(st, rd);
            do_forecast(st, rd);
            do_gcn_train(st, rd);
            do_gcn_refine(st, rd);
            do_classify(st, rd);
            do_eval(st, rd);
            do_report(st, rd);
            return 0;
        }
        if (chosen == "ablate") {
            Corpus corpus = load_run_corpus(rd);
            do_ablate(corpus, cfg, rd);
            return 0;
        }

        PipelineState st;
        st.cfg = cfg;
        st.corpus = load_run_corpus(rd);
        if (chosen == "embed") {
            do_embed(st, rd);
        } else if (chosen == "group") {
            load_embed_artifacts(st, rd);
            do_group(st, rd);
        } else if (chosen == "spatial-train") {
            load_embed_artifacts(st, rd);
            load_group_artifacts(st, rd);
            do_spatial_train(st, rd);
        } else if (chosen == "spatial-refine") {
            load_embed_artifacts(st, rd);
            load_group_artifacts(st, rd);
            load_spatial_model(st, rd);
            do_spatial_refine(st, rd);
        } else if (chosen == "temporal-train") {
            load_embed_artifacts(st, rd);
            load_group_artifacts(st, rd);
            load_refined(st, rd);
            do_temporal_train(st, rd);
        } else if (chosen == "forecast") {
            load_embed_artifacts(st, rd);
            load_group_artifacts(st, rd);
            load_refined(st, rd);
            load_temporal_model(st, rd);
            do_forecast(st, rd);
        } else if (chosen == "gcn-train") {
            load_embed_artifacts(st, rd);
            load_group_artifacts(st, rd);
            load_forecast_artifacts(st, rd);
            do_gcn_train(st, rd);
        } else if (chosen == "gcn-refine") {
            load_embed_artifacts(st, rd);
            load_group_artifacts(st, rd);
            load_forecast_artifacts(st, rd);
            load_gcn_model(st, rd);
            do_gcn_refine(st, rd);
        } else if (chosen == "classify") {
            load_embed_artifacts(st, rd);
            load_group_artifacts(st, rd);
            load_forecast_artifacts(st, rd);
            load_hidden(st, rd);
            do_classify(st, rd);
        } else if (chosen == "eval") {
            load_embed_artifacts(st, rd);
            load_group_artifacts(st, rd);
            do_eval(st, rd);
        } else if (chosen == "report") {
            load_embed_artifacts(st, rd);
            load_group_artifacts(st, rd);
            do_report(st, rd);
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
