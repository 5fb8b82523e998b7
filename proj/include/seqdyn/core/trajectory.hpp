#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "seqdyn/core/types.hpp"

namespace seqdyn {

struct CrossingEvent {
    double t = 0.0;
    Vec x;
    int section_id = 0;
    bool grazing = false;
};

/**
 * Sampled orbit with per-step cubic Hermite dense output. Each node stores the
 * state and the field value there, so the interpolant reproduces nodes exactly
 * and is C^1 across steps.
 */
class Trajectory {
public:
    Trajectory() = default;
    explicit Trajectory(int dim) : dim_(dim) {}

    int dim() const { return dim_; }
    std::size_t size() const { return times_.size(); }
    bool empty() const { return times_.empty(); }

    const std::vector<double>& times() const { return times_; }
    const std::vector<Vec>& states() const { return states_; }
    const std::vector<Vec>& slopes() const { return slopes_; }
    const std::vector<CrossingEvent>& events() const { return events_; }

    double t0() const { return times_.front(); }
    double t_end() const { return times_.back(); }
    const Vec& state(std::size_t k) const { return states_[k]; }
    double time(std::size_t k) const { return times_[k]; }

    void push_back(double t, Vec x, Vec dx)
    {
        if (dim_ == 0)
            dim_ = static_cast<int>(x.size());
        require(times_.empty() || t > times_.back(), "Trajectory: times must be strictly increasing");
        require(x.size() == dim_ && dx.size() == dim_, "Trajectory: dimension mismatch");
        times_.push_back(t);
        states_.push_back(std::move(x));
        slopes_.push_back(std::move(dx));
    }

    void add_event(CrossingEvent e) { events_.push_back(std::move(e)); }

    /// Index k of the step [t_k, t_{k+1}] containing t (clamped to the stored range).
    std::size_t segment(double t) const
    {
        if (times_.size() < 2)
            return 0;
        auto it = std::upper_bound(times_.begin(), times_.end(), t);
        std::size_t k = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
        return std::min(k, times_.size() - 2);
    }

    /// Dense interpolant on step k.
    Vec at_segment(std::size_t k, double t) const
    {
        if (times_.size() == 1)
            return states_.front();
        const double h = times_[k + 1] - times_[k];
        const double s = (t - times_[k]) / h;
        const double s2 = s * s, s3 = s2 * s;
        const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
        const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
        return h00 * states_[k] + h10 * h * slopes_[k] + h01 * states_[k + 1] + h11 * h * slopes_[k + 1];
    }

    Vec derivative_segment(std::size_t k, double t) const
    {
        if (times_.size() == 1)
            return slopes_.front();
        const double h = times_[k + 1] - times_[k];
        const double s = (t - times_[k]) / h;
        const double s2 = s * s;
        const double d00 = (6 * s2 - 6 * s) / h, d10 = 3 * s2 - 4 * s + 1;
        const double d01 = (-6 * s2 + 6 * s) / h, d11 = 3 * s2 - 2 * s;
        return d00 * states_[k] + d10 * slopes_[k] + d01 * states_[k + 1] + d11 * slopes_[k + 1];
    }

    Vec at(double t) const { return at_segment(segment(t), t); }
    Vec derivative_at(double t) const { return derivative_segment(segment(t), t); }

    /// Copy with every time multiplied by c > 0 (and slopes divided by c).
    Trajectory time_scaled(double c) const
    {
        require(c > 0.0, "time_scaled: factor must be positive");
        Trajectory out(dim_);
        for (std::size_t k = 0; k < size(); ++k)
            out.push_back(times_[k] * c, states_[k], slopes_[k] / c);
        return out;
    }

    bool finite() const
    {
        return std::all_of(states_.begin(), states_.end(), [](const Vec& v) { return v.allFinite(); });
    }

private:
    int dim_ = 0;
    std::vector<double> times_;
    std::vector<Vec> states_;
    std::vector<Vec> slopes_;
    std::vector<CrossingEvent> events_;
};

} // namespace seqdyn
