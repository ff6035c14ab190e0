#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "groupsleuth/classify.hpp"
#include "groupsleuth/corpus.hpp"
#include "groupsleuth/embedding.hpp"
#include "groupsleuth/eval.hpp"
#include "groupsleuth/gcn.hpp"
#include "groupsleuth/grouping.hpp"
#include "groupsleuth/represent.hpp"
#include "groupsleuth/spatial.hpp"
#include "groupsleuth/synth.hpp"
#include "groupsleuth/temporal.hpp"

namespace groupsleuth {

struct PipelineConfig {
    SynthConfig synth;
    CbowConfig cbow;
    SpatialTrainConfig spatial;
    TemporalTrainConfig temporal;
    GcnTrainConfig gcn;
    FcTrainConfig fc;
    double tau = 0.7;
    int window_len_days = 28;
    int m_max = 32;
    RemovalStrategy strategy = RemovalStrategy::kmeans;
    double centroid_theta = 1.5;
    double train_fraction = 0.8;
    double group_fraud_threshold = 0.5;
    std::uint64_t seed = 1;
};

std::vector<std::string> config_keys();
void apply_config(PipelineConfig& cfg, const std::string& key, const std::string& value);
/// Line-oriented `key = value`; '#' comments and blank lines skipped.
PipelineConfig load_config(const std::string& path);

enum class AblationMode { spatial, spatial_temporal, spatial_temporal_gcn, full };
std::string ablation_name(AblationMode mode);

/// Everything the stages read and write; stages append their names to audit.
struct PipelineState {
    PipelineConfig cfg;
    Corpus corpus;
    GroundTruth truth;  // may be empty for real corpora
    EmbeddingTable embeddings;
    std::vector<ReviewerVector> reviewer_vecs;
    std::vector<CoReviewGraph> graphs;
    std::vector<GroupTimeline> groups;
    std::vector<int> group_labels;          // majority rule over reviewer labels
    std::vector<int> train_groups, test_groups;
    HinRnnModel spatial_model;
    std::vector<GroupTimeline> refined;     // spatially refined timelines
    TemporalModel temporal_model;
    std::vector<std::vector<std::uint8_t>> forecasts;  // per group, n*n
    GcnModel gcn_model;
    std::vector<Tensor2> hidden_reps;       // per group, n x gcn.hidden
    FcModel fc_model;
    std::vector<GroupVerdict> verdicts;     // one per group, roster order
    std::vector<std::string> audit;
};

void stage_embed(PipelineState& st);
void stage_group(PipelineState& st);
/// Majority-rule group labels and the deterministic 80/20 split; called by
/// stage_group and by artifact loaders that skip it.
void derive_group_split(PipelineState& st);
void stage_spatial_train(PipelineState& st);
void stage_spatial_refine(PipelineState& st);
void stage_temporal_train(PipelineState& st);
void stage_forecast(PipelineState& st);
void stage_gcn_train(PipelineState& st);
void stage_gcn_refine(PipelineState& st);
void stage_classify(PipelineState& st, AblationMode mode = AblationMode::full);
/// Metrics over the held-out groups' verdicts.
Metrics stage_eval(const PipelineState& st);

struct AblationRow {
    std::string config;
    Metrics metrics;
    std::vector<std::string> audit;  // stage calls made before this row
};

/// Runs the stage prefix required by each configuration in order, producing
/// one metrics row per configuration over the shared held-out split.
std::vector<AblationRow> run_ablation(const Corpus& corpus, const PipelineConfig& cfg);

/// Per-slice training examples in roster order; refs (when non-null) records
/// the (group, window) of each example.
struct SliceRef {
    int group = 0;
    int window = 0;
};
std::vector<SpatialExample> collect_spatial_examples(const PipelineState& st,
                                                     const std::vector<GroupTimeline>& timelines,
                                                     const std::vector<int>* restrict_groups,
                                                     std::vector<SliceRef>* refs);

// --- run-directory artifacts ---

void save_group_timelines(const std::vector<GroupTimeline>& groups, const Corpus& corpus,
                          const std::string& path);
std::vector<GroupTimeline> load_group_timelines(const Corpus& corpus, const std::string& path);

void save_graphs(const std::vector<CoReviewGraph>& graphs, const Corpus& corpus,
                 const std::string& path);
std::vector<CoReviewGraph> load_graphs(const Corpus& corpus, const std::string& path);

void save_forecasts(const std::vector<std::vector<std::uint8_t>>& forecasts,
                    const std::vector<GroupTimeline>& groups, const std::string& path);
std::vector<std::vector<std::uint8_t>> load_forecasts(const std::vector<GroupTimeline>& groups,
                                                      const std::string& path);

void save_hidden_reps(const std::vector<Tensor2>& reps, const std::vector<GroupTimeline>& groups,
                      const Corpus& corpus, const std::string& path);
std::vector<Tensor2> load_hidden_reps(const std::vector<GroupTimeline>& groups,
                                      const std::string& path);

void save_verdicts(const std::vector<GroupVerdict>& verdicts,
                   const std::vector<GroupTimeline>& groups, const Corpus& corpus,
                   const std::vector<int>& test_groups, const std::string& path);
/// Returns (verdict per row, test flag per row).
std::pair<std::vector<GroupVerdict>, std::vector<bool>> load_verdicts(const std::string& path);

void save_metrics(const std::vector<AblationRow>& rows, const std::string& path);

std::uint64_t group_seed(std::uint64_t base, const std::string& group_id);

}  // namespace groupsleuth
