#pragma once

#include <optional>
#include <vector>

#include "seqdyn/approx/train.hpp"
#include "seqdyn/lv/lotka_volterra.hpp"

namespace seqdyn::approx {

/// Sample, initialize and train with every random stream seeded from cfg.seed.
inline TrainResult fit_target(const lv::LotkaVolterra& target, const TrainConfig& cfg, int hidden = 45,
                              std::optional<std::vector<int>> blocks = std::vector<int>{15, 15, 15},
                              const Dataset* data = nullptr)
{
    cfg.validate();
    const VectorField g = target.field();
    Dataset sampled;
    if (!data) {
        sampled = sample_dataset(g, cfg.domain, cfg.dataset_size, cfg.seed);
        data = &sampled;
    }
    return train(init_network(3, hidden, std::move(blocks), cfg.seed), *data, g, cfg);
}

} // namespace seqdyn::approx
