#include "groupsleuth/temporal.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

#include "groupsleuth/optim.hpp"
#include "groupsleuth/tensor.hpp"

namespace groupsleuth {

TemporalModel train_temporal(const std::vector<TemporalExample>& examples,
                             const TemporalTrainConfig& cfg, std::uint64_t seed) {
    std::mt19937 rng{std::uint32_t(seed)};
    TemporalModel model(cfg.m_max, cfg.hidden);
    model.init_params(rng);
    TemporalModel grads(cfg.m_max, cfg.hidden);
    auto slots = bind_slots<float>(model, grads);
    Optimizer<float> opt(OptKind::adam, cfg.lr);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        zero_grads(slots);
        auto [loss, count] = temporal_loss_and_grads(model, examples, &grads);
        if (count == 0) throw std::runtime_error("train_temporal: no group with >= 2 windows");
        clip_global_norm(slots, cfg.clip_norm);
        opt.step(slots);
        if (cfg.verbose && epoch % 50 == 0)
            std::cerr << "temporal epoch " << epoch << " mean bce " << loss / double(count) << "\n";
    }
    if (cfg.epochs == 0) {
        auto [loss, count] = temporal_loss_and_grads<float>(model, examples, nullptr);
        (void)loss;
        if (count == 0) throw std::runtime_error("train_temporal: no group with >= 2 windows");
    }
    model.trained = true;
    return model;
}

std::vector<float> forecast_probs(const TemporalModel& model, const TemporalExample& ex) {
    if (ex.slices.empty()) throw std::runtime_error("forecast: empty timeline");
    int from = temporal_detail::first_nonempty(ex);
    if (from == int(ex.slices.size())) from = 0;  // all-empty timeline: consume as-is
    std::vector<temporal_detail::StepCache<float>> fw;
    temporal_detail::recurrence_forward(model, ex, from, fw);
    auto p = temporal_detail::head_probs(model, fw.back().h);
    std::vector<float> out(std::size_t(ex.n) * std::size_t(ex.n), 0.f);
    for (int i = 0; i < ex.n; ++i)
        for (int j = i + 1; j < ex.n; ++j) {
            float v = p[std::size_t(i) * std::size_t(model.m_max) + std::size_t(j)];
            out[std::size_t(i) * std::size_t(ex.n) + std::size_t(j)] = v;
            out[std::size_t(j) * std::size_t(ex.n) + std::size_t(i)] = v;
        }
    return out;
}

std::vector<std::uint8_t> forecast(const TemporalModel& model, const TemporalExample& ex) {
    auto probs = forecast_probs(model, ex);
    std::vector<std::uint8_t> out(probs.size(), 0);
    for (int i = 0; i < ex.n; ++i)
        for (int j = 0; j < ex.n; ++j)
            if (i != j && probs[std::size_t(i) * std::size_t(ex.n) + std::size_t(j)] >= 0.5f)
                out[std::size_t(i) * std::size_t(ex.n) + std::size_t(j)] = 1;
    return out;
}

double temporal_mean_bce(const TemporalModel& model,
                         const std::vector<TemporalExample>& examples) {
    auto [loss, count] = temporal_loss_and_grads<float>(model, examples, nullptr);
    return count ? loss / double(count) : 0.0;
}

}  // namespace groupsleuth
