#include "groupsleuth/gcn.hpp"

#include <iostream>
#include <stdexcept>

#include "groupsleuth/optim.hpp"

namespace groupsleuth {

GcnModel train_gcn(const std::vector<GcnGroupData>& groups, const GcnTrainConfig& cfg,
                   std::uint64_t seed) {
    if (groups.empty()) throw std::runtime_error("train_gcn: no groups");
    long long labeled = 0;
    for (const auto& g : groups) {
        bool any = false;
        for (int y : g.labels)
            if (y >= 0) {
                ++labeled;
                any = true;
            }
        if (!any) throw std::runtime_error("train_gcn: group without reviewer labels");
    }
    std::mt19937 rng{std::uint32_t(seed)};
    GcnModel model(groups[0].features.cols, cfg.hidden);
    model.init_params(rng);
    GcnModel grads(model.in_dim, model.hidden);
    auto slots = bind_slots<float>(model, grads);
    Optimizer<float> opt(OptKind::adam, cfg.lr);

    double w = 1.0 / double(labeled);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        zero_grads(slots);
        double loss = 0;
        for (const auto& g : groups) {
            auto fw = gcn_forward(model, g.features, g.chat);
            loss += gcn_backward(model, g.features, g.chat, fw, g.labels, w, grads);
        }
        opt.step(slots);
        if (cfg.verbose && epoch % 20 == 0)
            std::cerr << "gcn epoch " << epoch << " loss " << loss << "\n";
    }
    return model;
}

double gcn_accuracy(const GcnModel& model, const std::vector<GcnGroupData>& groups) {
    long long correct = 0, total = 0;
    for (const auto& g : groups) {
        auto fw = gcn_forward(model, g.features, g.chat);
        for (std::size_t i = 0; i < g.labels.size(); ++i) {
            if (g.labels[i] < 0) continue;
            int pred = fw.probs(i, 1) >= fw.probs(i, 0) ? 1 : 0;
            if (pred == g.labels[i]) ++correct;
            ++total;
        }
    }
    return total ? double(correct) / double(total) : 0.0;
}

}  // namespace groupsleuth
