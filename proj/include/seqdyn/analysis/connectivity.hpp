#pragma once

#include <vector>

#include "seqdyn/approx/lift.hpp"

namespace seqdyn::analysis {

struct ConnectivitySummary {
    Mat means; // (i, j): mean of the block of WP mapping group j to group i
    std::vector<int> blocks;
};

inline ConnectivitySummary block_connectivity_means(const Mat& wp, const std::vector<int>& blocks)
{
    require(wp.rows() == wp.cols(), "block_connectivity_means: WP must be square");
    approx::ApproxNetwork::validate_layout(static_cast<int>(blocks.size()), static_cast<int>(wp.rows()), blocks);
    const int n = static_cast<int>(blocks.size());
    ConnectivitySummary out{Mat::Zero(n, n), blocks};
    std::vector<int> start(n, 0);
    for (int i = 1; i < n; ++i)
        start[i] = start[i - 1] + blocks[i - 1];
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out.means(i, j) = wp.block(start[i], start[j], blocks[i], blocks[j]).mean();
    return out;
}

inline ConnectivitySummary block_connectivity_means(const approx::LiftedSystem& lifted)
{
    require(lifted.blocks().has_value(), "block_connectivity_means: the network has no block layout");
    return block_connectivity_means(lifted.connectivity(), *lifted.blocks());
}

} // namespace seqdyn::analysis
