#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "seqdyn/core/activation.hpp"
#include "seqdyn/core/types.hpp"
#include "seqdyn/core/vector_field.hpp"

namespace seqdyn::approx {

/**
 * One-hidden-layer vector field
 *
 *     f(x) = -x + P sigma(W x + b),   P: n x N,  W: N x n,  b: N.
 *
 * With a block layout (N_1, ..., N_n), hidden units [N_1 + ... + N_{i-1}, ... + N_i)
 * feed output i only; every other entry of P is a structural zero, held in
 * `mask()` and re-applied after every parameter update.
 */
class ApproxNetwork {
public:
    ApproxNetwork() = default;

    ApproxNetwork(Mat p, Mat w, Vec b, std::optional<std::vector<int>> blocks, Activation sigma)
        : p_(std::move(p)), w_(std::move(w)), b_(std::move(b)), blocks_(std::move(blocks)), sigma_(sigma)
    {
        require(p_.cols() == w_.rows() && w_.rows() == b_.size(), "ApproxNetwork: inconsistent hidden width");
        require(p_.rows() == w_.cols(), "ApproxNetwork: P rows must equal input dimension");
        mask_ = block_mask(static_cast<int>(p_.rows()), static_cast<int>(p_.cols()), blocks_);
        p_ = p_.cwiseProduct(mask_);
    }

    int n() const { return static_cast<int>(p_.rows()); }
    int hidden() const { return static_cast<int>(p_.cols()); }
    const Mat& P() const { return p_; }
    const Mat& W() const { return w_; }
    const Vec& b() const { return b_; }
    const Mat& mask() const { return mask_; }
    const std::optional<std::vector<int>>& blocks() const { return blocks_; }
    const Activation& sigma() const { return sigma_; }

    /// Number of trainable scalars (structural zeros excluded).
    int parameter_count() const
    {
        return static_cast<int>(mask_.sum()) + static_cast<int>(w_.size() + b_.size());
    }

    Vec eval(const Vec& x) const { return -x + p_ * sigma_.value(Vec(w_ * x + b_)); }

    /// Df(x) = -I + P diag(sigma'(W x + b)) W
    Mat jacobian(const Vec& x) const
    {
        const Vec d = sigma_.derivative(Vec(w_ * x + b_));
        return -Mat::Identity(n(), n()) + p_ * d.asDiagonal() * w_;
    }

    /// Columns of x are points; returns f at each.
    Mat eval_batch(const Mat& x) const
    {
        Mat z = w_ * x;
        z.colwise() += b_;
        return -x + p_ * sigma_.value(z);
    }

    VectorField field() const
    {
        return {n(), [self = *this](const Vec& x) { return self.eval(x); },
                [self = *this](const Vec& x) { return self.jacobian(x); }, "approx_network"};
    }

    void set_parameters(Mat p, Mat w, Vec b)
    {
        require(p.rows() == p_.rows() && p.cols() == p_.cols() && w.rows() == w_.rows() &&
                    w.cols() == w_.cols() && b.size() == b_.size(),
                "ApproxNetwork: parameter shape mismatch");
        p_ = p.cwiseProduct(mask_);
        w_ = std::move(w);
        b_ = std::move(b);
    }

    static Mat block_mask(int n, int hidden, const std::optional<std::vector<int>>& blocks)
    {
        if (!blocks)
            return Mat::Ones(n, hidden);
        validate_layout(n, hidden, *blocks);
        Mat m = Mat::Zero(n, hidden);
        int start = 0;
        for (int i = 0; i < n; ++i) {
            m.block(i, start, 1, (*blocks)[i]).setOnes();
            start += (*blocks)[i];
        }
        return m;
    }

    static void validate_layout(int n, int hidden, const std::vector<int>& blocks)
    {
        require(static_cast<int>(blocks.size()) == n, "block layout: need one block per output");
        for (int s : blocks)
            require(s > 0, "block layout: block sizes must be positive");
        require(std::accumulate(blocks.begin(), blocks.end(), 0) == hidden,
                "block layout: block sizes must sum to the hidden width");
    }

private:
    Mat p_;
    Mat w_;
    Vec b_;
    std::optional<std::vector<int>> blocks_;
    Activation sigma_;
    Mat mask_;
};

/// Equal split of `hidden` units over n outputs (the remainder goes to the first blocks).
inline std::vector<int> even_blocks(int n, int hidden)
{
    std::vector<int> sizes(n, hidden / n);
    for (int i = 0; i < hidden % n; ++i)
        ++sizes[i];
    return sizes;
}

/**
 * Deterministic initialization: W ~ U(-sqrt(6/(n+N)), +sqrt(6/(n+N))), b = 0,
 * nonzero P entries ~ U(-1, 1) / sqrt(N_i) with N_i the size of the unit's block
 * (N_i = N without a layout).
 */
inline ApproxNetwork init_network(int n, int hidden, std::optional<std::vector<int>> blocks, std::uint64_t seed,
                                  Activation sigma = {})
{
    require(n >= 1, "init_network: n must be positive");
    require(hidden >= n, "init_network: hidden width must be >= n");
    const Mat mask = ApproxNetwork::block_mask(n, hidden, blocks);
    std::mt19937_64 rng(seed);
    const double w_lim = std::sqrt(6.0 / (n + hidden));
    std::uniform_real_distribution<double> uw(-w_lim, w_lim);
    std::uniform_real_distribution<double> up(-1.0, 1.0);
    Mat w(hidden, n);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
        for (Eigen::Index c = 0; c < w.cols(); ++c)
            w(r, c) = uw(rng);
    Mat p = Mat::Zero(n, hidden);
    for (int i = 0; i < n; ++i) {
        const double scale = 1.0 / std::sqrt(mask.row(i).sum());
        for (int j = 0; j < hidden; ++j)
            if (mask(i, j) != 0.0)
                p(i, j) = up(rng) * scale;
    }
    return {std::move(p), std::move(w), Vec::Zero(hidden), std::move(blocks), sigma};
}

} // namespace seqdyn::approx
