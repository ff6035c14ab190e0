#include "groupsleuth/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace groupsleuth {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

struct KeyBinding {
    const char* key;
    std::function<void(PipelineConfig&, const std::string&)> set;
};

int to_int(const std::string& v) { return std::stoi(v); }
double to_real(const std::string& v) { return std::stod(v); }

const std::vector<KeyBinding>& bindings() {
    static const std::vector<KeyBinding> b = {
        {"synth.n_fraud_groups", [](PipelineConfig& c, const std::string& v) { c.synth.n_fraud_groups = to_int(v); }},
        {"synth.n_genuine_groups", [](PipelineConfig& c, const std::string& v) { c.synth.n_genuine_groups = to_int(v); }},
        {"synth.group_size_min", [](PipelineConfig& c, const std::string& v) { c.synth.group_size_min = to_int(v); }},
        {"synth.group_size_max", [](PipelineConfig& c, const std::string& v) { c.synth.group_size_max = to_int(v); }},
        {"synth.n_windows", [](PipelineConfig& c, const std::string& v) { c.synth.n_windows = to_int(v); }},
        {"synth.window_len_days", [](PipelineConfig& c, const std::string& v) { c.synth.window_len_days = to_int(v); }},
        {"synth.camouflage_rate", [](PipelineConfig& c, const std::string& v) { c.synth.camouflage_rate = to_real(v); }},
        {"synth.outlier_rate", [](PipelineConfig& c, const std::string& v) { c.synth.outlier_rate = to_real(v); }},
        {"synth.fraud_vocab", [](PipelineConfig& c, const std::string& v) { c.synth.fraud_vocab = to_int(v); }},
        {"synth.genuine_vocab", [](PipelineConfig& c, const std::string& v) { c.synth.genuine_vocab = to_int(v); }},
        {"synth.fraud_low_rating_rate", [](PipelineConfig& c, const std::string& v) { c.synth.fraud_low_rating_rate = to_real(v); }},
        {"synth.solo_reviews_min", [](PipelineConfig& c, const std::string& v) { c.synth.solo_reviews_min = to_int(v); }},
        {"synth.solo_reviews_max", [](PipelineConfig& c, const std::string& v) { c.synth.solo_reviews_max = to_int(v); }},
        {"cbow.dim", [](PipelineConfig& c, const std::string& v) { c.cbow.dim = to_int(v); }},
        {"cbow.window", [](PipelineConfig& c, const std::string& v) { c.cbow.window = to_int(v); }},
        {"cbow.batch", [](PipelineConfig& c, const std::string& v) { c.cbow.batch = to_int(v); }},
        {"cbow.epochs", [](PipelineConfig& c, const std::string& v) { c.cbow.epochs = to_int(v); }},
        {"cbow.min_count", [](PipelineConfig& c, const std::string& v) { c.cbow.min_count = to_int(v); }},
        {"cbow.negatives", [](PipelineConfig& c, const std::string& v) { c.cbow.negatives = to_int(v); }},
        {"cbow.lr", [](PipelineConfig& c, const std::string& v) { c.cbow.lr = to_real(v); }},
        {"spatial.lr", [](PipelineConfig& c, const std::string& v) { c.spatial.lr = to_real(v); }},
        {"spatial.epochs", [](PipelineConfig& c, const std::string& v) { c.spatial.epochs = to_int(v); }},
        {"spatial.batch", [](PipelineConfig& c, const std::string& v) { c.spatial.batch = to_int(v); }},
        {"temporal.lr", [](PipelineConfig& c, const std::string& v) { c.temporal.lr = to_real(v); }},
        {"temporal.epochs", [](PipelineConfig& c, const std::string& v) { c.temporal.epochs = to_int(v); }},
        {"temporal.hidden", [](PipelineConfig& c, const std::string& v) { c.temporal.hidden = to_int(v); }},
        {"gcn.lr", [](PipelineConfig& c, const std::string& v) { c.gcn.lr = to_real(v); }},
        {"gcn.epochs", [](PipelineConfig& c, const std::string& v) { c.gcn.epochs = to_int(v); }},
        {"gcn.hidden", [](PipelineConfig& c, const std::string& v) { c.gcn.hidden = std::size_t(to_int(v)); }},
        {"fc.lr", [](PipelineConfig& c, const std::string& v) { c.fc.lr = to_real(v); }},
        {"fc.epochs", [](PipelineConfig& c, const std::string& v) { c.fc.epochs = to_int(v); }},
        {"tau", [](PipelineConfig& c, const std::string& v) { c.tau = to_real(v); }},
        {"window_len_days", [](PipelineConfig& c, const std::string& v) { c.window_len_days = to_int(v); }},
        {"m_max", [](PipelineConfig& c, const std::string& v) { c.m_max = to_int(v); }},
        {"strategy", [](PipelineConfig& c, const std::string& v) { c.strategy = parse_strategy(v); }},
        {"centroid_theta", [](PipelineConfig& c, const std::string& v) { c.centroid_theta = to_real(v); }},
        {"train_fraction", [](PipelineConfig& c, const std::string& v) { c.train_fraction = to_real(v); }},
        {"group_fraud_threshold", [](PipelineConfig& c, const std::string& v) { c.group_fraud_threshold = to_real(v); }},
        {"seed", [](PipelineConfig& c, const std::string& v) { c.seed = std::stoull(v); }},
    };
    return b;
}

}  // namespace

std::vector<std::string> config_keys() {
    std::vector<std::string> keys;
    for (const auto& b : bindings()) keys.push_back(b.key);
    return keys;
}

void apply_config(PipelineConfig& cfg, const std::string& key, const std::string& value) {
    for (const auto& b : bindings())
        if (key == b.key) {
            b.set(cfg, value);
            return;
        }
    std::string msg = "unknown config key \"" + key + "\" (valid keys:";
    for (const auto& b : bindings()) msg += std::string(" ") + b.key;
    throw std::runtime_error(msg + ")");
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config " + path);
    PipelineConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key = value");
        apply_config(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return cfg;
}

std::string ablation_name(AblationMode mode) {
    switch (mode) {
        case AblationMode::spatial: return "spatial";
        case AblationMode::spatial_temporal: return "spatial+temporal";
        case AblationMode::spatial_temporal_gcn: return "spatial+temporal+gcn";
        case AblationMode::full: return "full";
    }
    return "?";
}

std::uint64_t group_seed(std::uint64_t base, const std::string& group_id) {
    std::uint64_t h = 1469598103934665603ull ^ base;
    for (unsigned char c : group_id) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

void stage_embed(PipelineState& st) {
    st.audit.push_back("embed");
    st.embeddings = train_cbow(st.corpus, st.cfg.cbow, st.cfg.seed);
    st.reviewer_vecs = compute_reviewer_vectors(st.corpus, st.embeddings);
}

void stage_group(PipelineState& st) {
    st.audit.push_back("group");
    st.graphs = build_co_review_graphs(st.corpus, st.embeddings, st.cfg.tau,
                                       st.cfg.window_len_days);
    st.groups = build_group_timelines(st.graphs, st.cfg.m_max);
    derive_group_split(st);
}

void derive_group_split(PipelineState& st) {
    auto labels = derive_reviewer_labels(st.corpus);
    std::map<std::string, bool> fraud;
    for (const auto& l : labels) fraud[l.reviewer_id] = l.fraudster;
    st.group_labels.clear();
    for (const auto& g : st.groups) {
        int n_fraud = 0;
        for (int m : g.members)
            if (fraud[st.corpus.reviewer_ids[std::size_t(m)]]) ++n_fraud;
        st.group_labels.push_back(
            double(n_fraud) > st.cfg.group_fraud_threshold * double(g.size()) ? 1 : 0);
    }
    auto [train, test] = stratified_split(st.group_labels, st.cfg.train_fraction, st.cfg.seed);
    st.train_groups = train;
    st.test_groups = test;
}

std::vector<SpatialExample> collect_spatial_examples(const PipelineState& st,
                                                     const std::vector<GroupTimeline>& timelines,
                                                     const std::vector<int>* restrict_groups,
                                                     std::vector<SliceRef>* refs) {
    std::vector<int> which;
    if (restrict_groups)
        which = *restrict_groups;
    else
        for (int g = 0; g < int(timelines.size()); ++g) which.push_back(g);

    std::vector<SpatialExample> out;
    for (int gi : which) {
        const auto& g = timelines[std::size_t(gi)];
        int n = g.size();
        for (int w = 0; w < g.n_windows(); ++w) {
            const auto& slice = g.slices[std::size_t(w)];
            bool any = std::any_of(slice.begin(), slice.end(), [](std::uint8_t b) { return b != 0; });
            if (!any) continue;
            SpatialExample ex;
            ex.n = n;
            ex.adj = slice;
            ex.reps.reserve(std::size_t(n));
            const TimeWindow& win = st.graphs[std::size_t(w)].window;
            for (int m : g.members) {
                auto rv = reviewer_vector_windowed(st.corpus, m, win.start_date, win.end_date,
                                                  st.embeddings, st.reviewer_vecs[std::size_t(m)]);
                ex.reps.push_back(rv.v);
            }
            out.push_back(std::move(ex));
            if (refs) refs->push_back({gi, w});
        }
    }
    return out;
}

void stage_spatial_train(PipelineState& st) {
    st.audit.push_back("spatial-train");
    auto examples = collect_spatial_examples(st, st.groups, &st.train_groups, nullptr);
    if (examples.empty())
        examples = collect_spatial_examples(st, st.groups, nullptr, nullptr);
    SpatialTrainConfig cfg = st.cfg.spatial;
    cfg.m_max = st.cfg.m_max;
    cfg.rep_dim = st.cfg.cbow.dim + 1;
    st.spatial_model = train_hinrnn(examples, cfg, st.cfg.seed);
}

void stage_spatial_refine(PipelineState& st) {
    st.audit.push_back("spatial-refine");
    st.refined = st.groups;
    std::vector<SliceRef> refs;
    auto examples = collect_spatial_examples(st, st.groups, nullptr, &refs);
    for (std::size_t i = 0; i < examples.size(); ++i) {
        auto refined = refine_slice(st.spatial_model, examples[i]);
        st.refined[std::size_t(refs[i].group)].slices[std::size_t(refs[i].window)] = refined;
    }
}

namespace {

TemporalExample to_temporal(const GroupTimeline& g) {
    TemporalExample ex;
    ex.n = g.size();
    ex.slices = g.slices;
    return ex;
}

}  // namespace

void stage_temporal_train(PipelineState& st) {
    st.audit.push_back("temporal-train");
    std::vector<TemporalExample> examples;
    for (int gi : st.train_groups) examples.push_back(to_temporal(st.refined[std::size_t(gi)]));
    TemporalTrainConfig cfg = st.cfg.temporal;
    cfg.m_max = st.cfg.m_max;
    st.temporal_model = train_temporal(examples, cfg, st.cfg.seed);
}

void stage_forecast(PipelineState& st) {
    st.audit.push_back("forecast");
    st.forecasts.clear();
    for (const auto& g : st.refined)
        st.forecasts.push_back(forecast(st.temporal_model, to_temporal(g)));
}

namespace {

GcnGroupData make_gcn_data(const PipelineState& st, int gi, bool labeled) {
    const auto& g = st.groups[std::size_t(gi)];
    std::size_t n = std::size_t(g.size());
    std::size_t d = st.reviewer_vecs.empty() ? 0 : st.reviewer_vecs[0].v.size();
    GcnGroupData data;
    data.features = Tensor2(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& v = st.reviewer_vecs[std::size_t(g.members[i])].v;
        for (std::size_t k = 0; k < d; ++k) data.features(i, k) = v[k];
    }
    Tensor2 adj(n, n);
    const auto& fc = st.forecasts[std::size_t(gi)];
    for (std::size_t k = 0; k < fc.size(); ++k) adj.data[k] = float(fc[k]);
    data.chat = normalize_adjacency(adj);
    data.labels.assign(n, -1);
    if (labeled) {
        auto labels = derive_reviewer_labels(st.corpus);
        std::map<std::string, bool> fraud;
        for (const auto& l : labels) fraud[l.reviewer_id] = l.fraudster;
        for (std::size_t i = 0; i < n; ++i)
            data.labels[i] = fraud[st.corpus.reviewer_ids[std::size_t(g.members[i])]] ? 1 : 0;
    }
    return data;
}

}  // namespace

void stage_gcn_train(PipelineState& st) {
    st.audit.push_back("gcn-train");
    std::vector<GcnGroupData> data;
    for (int gi : st.train_groups) data.push_back(make_gcn_data(st, gi, true));
    if (data.empty())
        for (int gi = 0; gi < int(st.groups.size()); ++gi)
            data.push_back(make_gcn_data(st, gi, true));
    st.gcn_model = train_gcn(data, st.cfg.gcn, st.cfg.seed);
}

void stage_gcn_refine(PipelineState& st) {
    st.audit.push_back("gcn-refine");
    st.hidden_reps.clear();
    for (int gi = 0; gi < int(st.groups.size()); ++gi) {
        auto data = make_gcn_data(st, gi, false);
        auto fw = gcn_forward(st.gcn_model, data.features, data.chat);
        st.hidden_reps.push_back(fw.hidden);
    }
}

void stage_classify(PipelineState& st, AblationMode mode) {
    st.audit.push_back("classify:" + ablation_name(mode));
    bool use_gcn = mode == AblationMode::spatial_temporal_gcn || mode == AblationMode::full;

    st.verdicts.clear();
    for (int gi = 0; gi < int(st.groups.size()); ++gi) {
        const auto& g = st.groups[std::size_t(gi)];
        std::size_t n = std::size_t(g.size());
        Tensor2 pts;
        if (use_gcn) {
            pts = st.hidden_reps[std::size_t(gi)];
        } else {
            std::size_t d = st.reviewer_vecs[0].v.size();
            pts = Tensor2(n, d);
            for (std::size_t i = 0; i < n; ++i) {
                const auto& v = st.reviewer_vecs[std::size_t(g.members[i])].v;
                for (std::size_t k = 0; k < d; ++k) pts(i, k) = v[k];
            }
        }

        GroupVerdict verdict;
        verdict.group_id = g.group_id;
        std::uint64_t gseed = group_seed(st.cfg.seed, g.group_id);
        if (mode == AblationMode::full) {
            verdict.kept = remove_outliers(st.cfg.strategy, pts,
                                           st.forecasts[std::size_t(gi)], gseed,
                                           st.cfg.centroid_theta);
            auto gate = st.cfg.strategy == RemovalStrategy::kmedians ? kmedians2(pts, gseed)
                                                                     : kmeans2(pts, gseed);
            verdict.bss_norm = gate.bss_norm;
            verdict.mixed = gate.mixed;
            verdict.strategy = strategy_name(st.cfg.strategy);
        } else if (mode == AblationMode::spatial_temporal) {
            // temporal-only pruning: keep members the forecast still connects
            const auto& fc = st.forecasts[std::size_t(gi)];
            for (std::size_t i = 0; i < n; ++i) {
                bool connected = false;
                for (std::size_t j = 0; j < n; ++j)
                    if (fc[i * n + j]) connected = true;
                if (connected) verdict.kept.push_back(int(i));
            }
            if (verdict.kept.empty())
                for (std::size_t i = 0; i < n; ++i) verdict.kept.push_back(int(i));
            verdict.strategy = "none";
        } else {
            for (std::size_t i = 0; i < n; ++i) verdict.kept.push_back(int(i));
            verdict.strategy = "none";
        }
        verdict.gvec = group_vector(pts, verdict.kept);
        st.verdicts.push_back(std::move(verdict));
    }

    std::vector<std::vector<float>> train_vecs;
    std::vector<int> train_labels;
    for (int gi : st.train_groups) {
        train_vecs.push_back(st.verdicts[std::size_t(gi)].gvec);
        train_labels.push_back(st.group_labels[std::size_t(gi)]);
    }
    st.fc_model = train_fc(train_vecs, train_labels, st.cfg.fc, st.cfg.seed);
    for (auto& v : st.verdicts) {
        v.score = st.fc_model.score(v.gvec);
        v.fraud = v.score >= 0.5f;
    }
}

Metrics stage_eval(const PipelineState& st) {
    std::vector<int> pred, truth;
    for (int gi : st.test_groups) {
        pred.push_back(st.verdicts[std::size_t(gi)].fraud ? 1 : 0);
        truth.push_back(st.group_labels[std::size_t(gi)]);
    }
    return compute_metrics(pred, truth);
}

std::vector<AblationRow> run_ablation(const Corpus& corpus, const PipelineConfig& cfg) {
    PipelineState st;
    st.cfg = cfg;
    st.corpus = corpus;
    st.corpus.rebuild_indices();

    stage_embed(st);
    stage_group(st);
    stage_spatial_train(st);
    stage_spatial_refine(st);

    std::vector<AblationRow> rows;
    auto emit = [&](AblationMode mode) {
        stage_classify(st, mode);
        rows.push_back({ablation_name(mode), stage_eval(st), st.audit});
    };
    emit(AblationMode::spatial);
    stage_temporal_train(st);
    stage_forecast(st);
    emit(AblationMode::spatial_temporal);
    stage_gcn_train(st);
    stage_gcn_refine(st);
    emit(AblationMode::spatial_temporal_gcn);
    emit(AblationMode::full);
    return rows;
}

// --- artifacts ---

namespace {

void check_header(std::ifstream& in, const std::string& path, const std::string& expected) {
    std::string line;
    if (!std::getline(in, line) || line != expected)
        throw std::runtime_error(path + ": bad or stale artifact header (expected \"" +
                                 expected + "\")");
}

std::string bits_to_string(const std::vector<std::uint8_t>& bits) {
    std::string s(bits.size(), '0');
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) s[i] = '1';
    return s;
}

std::vector<std::uint8_t> string_to_bits(const std::string& s) {
    std::vector<std::uint8_t> bits(s.size(), 0);
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '0' && s[i] != '1') throw std::runtime_error("bad slice bitstring");
        bits[i] = s[i] == '1';
    }
    return bits;
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

int dense_of(const Corpus& corpus, const std::string& reviewer_id) {
    auto it = corpus.reviewer_index.find(reviewer_id);
    if (it == corpus.reviewer_index.end())
        throw std::runtime_error("unknown reviewer id \"" + reviewer_id + "\" in artifact");
    return it->second;
}

}  // namespace

void save_group_timelines(const std::vector<GroupTimeline>& groups, const Corpus& corpus,
                          const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "#groupsleuth-groups v1\n";
    int n_windows = groups.empty() ? 0 : groups[0].n_windows();
    out << "windows\t" << n_windows << '\n';
    for (const auto& g : groups) {
        out << "group\t" << g.group_id << '\t';
        for (std::size_t i = 0; i < g.members.size(); ++i) {
            if (i) out << ',';
            out << corpus.reviewer_ids[std::size_t(g.members[i])];
        }
        out << '\n';
        for (int w = 0; w < g.n_windows(); ++w) {
            const auto& slice = g.slices[std::size_t(w)];
            if (std::any_of(slice.begin(), slice.end(), [](std::uint8_t b) { return b != 0; }))
                out << "slice\t" << w << '\t' << bits_to_string(slice) << '\n';
        }
    }
}

std::vector<GroupTimeline> load_group_timelines(const Corpus& corpus, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    check_header(in, path, "#groupsleuth-groups v1");
    std::string line;
    int n_windows = -1;
    std::vector<GroupTimeline> groups;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string kind;
        std::getline(ss, kind, '\t');
        if (kind == "windows") {
            ss >> n_windows;
        } else if (kind == "group") {
            if (n_windows < 0) throw std::runtime_error(path + ": missing windows line");
            GroupTimeline g;
            std::string id, members;
            std::getline(ss, id, '\t');
            std::getline(ss, members, '\t');
            g.group_id = id;
            for (const auto& m : split_csv(members)) g.members.push_back(dense_of(corpus, m));
            g.slices.assign(std::size_t(n_windows),
                            std::vector<std::uint8_t>(g.members.size() * g.members.size(), 0));
            groups.push_back(std::move(g));
        } else if (kind == "slice") {
            if (groups.empty()) throw std::runtime_error(path + ": slice before group");
            std::string w, bits;
            std::getline(ss, w, '\t');
            std::getline(ss, bits, '\t');
            auto& g = groups.back();
            int wi = std::stoi(w);
            if (wi < 0 || wi >= g.n_windows()) throw std::runtime_error(path + ": bad window index");
            auto slice = string_to_bits(bits);
            if (slice.size() != g.members.size() * g.members.size())
                throw std::runtime_error(path + ": slice size mismatch");
            g.slices[std::size_t(wi)] = std::move(slice);
        } else {
            throw std::runtime_error(path + ": unknown record \"" + kind + "\"");
        }
    }
    return groups;
}

void save_graphs(const std::vector<CoReviewGraph>& graphs, const Corpus& corpus,
                 const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "#groupsleuth-graphs v1\n";
    for (const auto& g : graphs) {
        out << "window\t" << g.window.index << '\t' << g.window.start_date << '\t'
            << g.window.end_date << '\n';
        for (const auto& [a, b] : g.edges)
            out << "edge\t" << corpus.reviewer_ids[std::size_t(a)] << '\t'
                << corpus.reviewer_ids[std::size_t(b)] << '\n';
    }
}

std::vector<CoReviewGraph> load_graphs(const Corpus& corpus, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    check_header(in, path, "#groupsleuth-graphs v1");
    std::vector<CoReviewGraph> graphs;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string kind;
        std::getline(ss, kind, '\t');
        if (kind == "window") {
            CoReviewGraph g;
            ss >> g.window.index >> g.window.start_date >> g.window.end_date;
            graphs.push_back(std::move(g));
        } else if (kind == "edge") {
            if (graphs.empty()) throw std::runtime_error(path + ": edge before window");
            std::string a, b;
            std::getline(ss, a, '\t');
            std::getline(ss, b, '\t');
            int da = dense_of(corpus, a), db = dense_of(corpus, b);
            graphs.back().edges.push_back({std::min(da, db), std::max(da, db)});
        } else {
            throw std::runtime_error(path + ": unknown record \"" + kind + "\"");
        }
    }
    return graphs;
}

void save_forecasts(const std::vector<std::vector<std::uint8_t>>& forecasts,
                    const std::vector<GroupTimeline>& groups, const std::string& path) {
    if (forecasts.size() != groups.size())
        throw std::runtime_error("save_forecasts: group count mismatch");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "#groupsleuth-forecast v1\n";
    for (std::size_t i = 0; i < groups.size(); ++i)
        out << groups[i].group_id << '\t' << bits_to_string(forecasts[i]) << '\n';
}

std::vector<std::vector<std::uint8_t>> load_forecasts(const std::vector<GroupTimeline>& groups,
                                                      const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    check_header(in, path, "#groupsleuth-forecast v1");
    std::map<std::string, std::vector<std::uint8_t>> by_id;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string id, bits;
        std::getline(ss, id, '\t');
        std::getline(ss, bits, '\t');
        by_id[id] = string_to_bits(bits);
    }
    std::vector<std::vector<std::uint8_t>> out;
    for (const auto& g : groups) {
        auto it = by_id.find(g.group_id);
        if (it == by_id.end())
            throw std::runtime_error(path + ": no forecast for group " + g.group_id);
        if (it->second.size() != std::size_t(g.size()) * std::size_t(g.size()))
            throw std::runtime_error(path + ": forecast size mismatch for " + g.group_id);
        out.push_back(it->second);
    }
    return out;
}

void save_hidden_reps(const std::vector<Tensor2>& reps, const std::vector<GroupTimeline>& groups,
                      const Corpus& corpus, const std::string& path) {
    if (reps.size() != groups.size())
        throw std::runtime_error("save_hidden_reps: group count mismatch");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "#groupsleuth-refined-reps v1\n";
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const auto& g = groups[gi];
        for (std::size_t i = 0; i < std::size_t(g.size()); ++i) {
            out << g.group_id << '\t' << corpus.reviewer_ids[std::size_t(g.members[i])];
            for (std::size_t k = 0; k < reps[gi].cols; ++k) out << '\t' << reps[gi](i, k);
            out << '\n';
        }
    }
}

std::vector<Tensor2> load_hidden_reps(const std::vector<GroupTimeline>& groups,
                                      const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    check_header(in, path, "#groupsleuth-refined-reps v1");
    std::map<std::string, std::vector<std::vector<float>>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string id, member;
        std::getline(ss, id, '\t');
        std::getline(ss, member, '\t');
        std::vector<float> vals;
        std::string tok;
        while (std::getline(ss, tok, '\t')) vals.push_back(std::stof(tok));
        rows[id].push_back(std::move(vals));
    }
    std::vector<Tensor2> out;
    for (const auto& g : groups) {
        auto it = rows.find(g.group_id);
        if (it == rows.end() || int(it->second.size()) != g.size())
            throw std::runtime_error(path + ": refined reps missing rows for " + g.group_id);
        std::size_t d = it->second[0].size();
        Tensor2 t(std::size_t(g.size()), d);
        for (std::size_t i = 0; i < it->second.size(); ++i)
            for (std::size_t k = 0; k < d; ++k) t(i, k) = it->second[i][k];
        out.push_back(std::move(t));
    }
    return out;
}

void save_verdicts(const std::vector<GroupVerdict>& verdicts,
                   const std::vector<GroupTimeline>& groups, const Corpus& corpus,
                   const std::vector<int>& test_groups, const std::string& path) {
    if (verdicts.size() != groups.size())
        throw std::runtime_error("save_verdicts: group count mismatch");
    std::vector<bool> is_test(groups.size(), false);
    for (int gi : test_groups) is_test[std::size_t(gi)] = true;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "#groupsleuth-verdicts v1\n";
    out << "group_id\tkept_members\tscore\tlabel\tbss_norm\tmixed\tstrategy\tsplit\n";
    char buf[64];
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const auto& v = verdicts[gi];
        const auto& g = groups[gi];
        out << v.group_id << '\t';
        for (std::size_t i = 0; i < v.kept.size(); ++i) {
            if (i) out << ',';
            out << corpus.reviewer_ids[std::size_t(g.members[std::size_t(v.kept[i])])];
        }
        std::snprintf(buf, sizeof buf, "%.6f", double(v.score));
        out << '\t' << buf;
        out << '\t' << (v.fraud ? "fraud" : "genuine");
        std::snprintf(buf, sizeof buf, "%.6f", v.bss_norm);
        out << '\t' << buf;
        out << '\t' << (v.mixed ? 1 : 0);
        out << '\t' << v.strategy;
        out << '\t' << (is_test[gi] ? "test" : "train") << '\n';
    }
}

std::pair<std::vector<GroupVerdict>, std::vector<bool>> load_verdicts(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    check_header(in, path, "#groupsleuth-verdicts v1");
    std::string line;
    std::getline(in, line);  // column header
    std::vector<GroupVerdict> verdicts;
    std::vector<bool> is_test;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string id, kept, score, label, bss, mixed, strategy, split;
        std::getline(ss, id, '\t');
        std::getline(ss, kept, '\t');
        std::getline(ss, score, '\t');
        std::getline(ss, label, '\t');
        std::getline(ss, bss, '\t');
        std::getline(ss, mixed, '\t');
        std::getline(ss, strategy, '\t');
        std::getline(ss, split, '\t');
        GroupVerdict v;
        v.group_id = id;
        v.score = std::stof(score);
        v.fraud = label == "fraud";
        v.bss_norm = std::stod(bss);
        v.mixed = mixed == "1";
        v.strategy = strategy;
        verdicts.push_back(std::move(v));
        is_test.push_back(split == "test");
    }
    return {verdicts, is_test};
}

void save_metrics(const std::vector<AblationRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "#groupsleuth-metrics v1\n";
    out << "config\tprecision\trecall\tf1\ttp\tfp\tfn\ttn\tundef_flags\n";
    char buf[64];
    for (const auto& r : rows) {
        const auto& m = r.metrics;
        out << r.config;
        std::snprintf(buf, sizeof buf, "\t%.6f\t%.6f\t%.6f", m.precision, m.recall, m.f1);
        out << buf << '\t' << m.tp << '\t' << m.fp << '\t' << m.fn << '\t' << m.tn << '\t'
            << (m.precision_defined ? 0 : 1) << (m.recall_defined ? 0 : 1)
            << (m.f1_defined ? 0 : 1) << '\n';
    }
}

}  // namespace groupsleuth
