#pragma once

#include "seqdyn/approx/network.hpp"

namespace seqdyn::approx {

/**
 * N-population system y' = H(y) = -y + sigma(W P y + b). Its projection x = P y
 * follows the learned field exactly: P H(y) = f(P y).
 */
class LiftedSystem {
public:
    LiftedSystem() = default;
    explicit LiftedSystem(const ApproxNetwork& net)
        : wp_(net.W() * net.P()), b_(net.b()), p_(net.P()), sigma_(net.sigma()), blocks_(net.blocks())
    {
    }

    int dim() const { return static_cast<int>(wp_.rows()); }
    const Mat& connectivity() const { return wp_; }
    const Vec& b() const { return b_; }
    const Mat& projection() const { return p_; }
    const Activation& sigma() const { return sigma_; }
    const std::optional<std::vector<int>>& blocks() const { return blocks_; }

    Vec eval(const Vec& y) const { return -y + sigma_.value(Vec(wp_ * y + b_)); }

    Mat jacobian(const Vec& y) const
    {
        const Vec d = sigma_.derivative(Vec(wp_ * y + b_));
        return -Mat::Identity(dim(), dim()) + d.asDiagonal() * wp_;
    }

    Vec project(const Vec& y) const { return p_ * y; }

    VectorField field() const
    {
        return {dim(), [self = *this](const Vec& y) { return self.eval(y); },
                [self = *this](const Vec& y) { return self.jacobian(y); }, "lifted"};
    }

private:
    Mat wp_;
    Vec b_;
    Mat p_;
    Activation sigma_;
    std::optional<std::vector<int>> blocks_;
};

inline LiftedSystem lift(const ApproxNetwork& net) { return LiftedSystem(net); }

} // namespace seqdyn::approx
