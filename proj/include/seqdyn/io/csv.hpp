#pragma once

#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "seqdyn/core/trajectory.hpp"
#include "seqdyn/nfield/perturbation.hpp"

namespace seqdyn::io {

namespace detail {

inline std::ofstream open_csv(const std::string& path)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot open " + path + " for writing");
    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    return os;
}

} // namespace detail

/// t, x_1..x_n per stored node.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj)
{
    os << "t";
    for (int i = 1; i <= traj.dim(); ++i)
        os << ",x_" << i;
    os << '\n';
    for (std::size_t k = 0; k < traj.size(); ++k) {
        os << traj.time(k);
        for (double v : traj.state(k))
            os << ',' << v;
        os << '\n';
    }
}

inline void write_trajectory_csv(const std::string& path, const Trajectory& traj)
{
    auto os = detail::open_csv(path);
    write_trajectory_csv(os, traj);
}

/// One row per crossing: index, t, section_id, grazing, x_1..x_n, interval to the previous crossing.
inline void write_crossings_csv(std::ostream& os, const std::vector<CrossingEvent>& events)
{
    const std::size_t n = events.empty() ? 0 : static_cast<std::size_t>(events.front().x.size());
    os << "k,t,section_id,grazing";
    for (std::size_t i = 1; i <= n; ++i)
        os << ",x_" << i;
    os << ",interval\n";
    for (std::size_t k = 0; k < events.size(); ++k) {
        const auto& e = events[k];
        os << k << ',' << e.t << ',' << e.section_id << ',' << (e.grazing ? 1 : 0);
        for (double v : e.x)
            os << ',' << v;
        os << ',';
        if (k > 0)
            os << e.t - events[k - 1].t;
        os << '\n';
    }
}

inline void write_crossings_csv(const std::string& path, const std::vector<CrossingEvent>& events)
{
    auto os = detail::open_csv(path);
    write_crossings_csv(os, events);
}

inline void write_convergence_csv(std::ostream& os, const std::vector<nfield::ConvergenceRow>& rows)
{
    os << "eps,sup_value,sup_jacobian,c1,ratio,valid,reason\n";
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& r = rows[k];
        os << r.eps << ',' << r.sup_value << ',' << r.sup_jacobian << ',' << r.c1() << ',';
        if (k > 0 && r.valid && rows[k - 1].valid)
            os << r.c1() / rows[k - 1].c1();
        os << ',' << (r.valid ? 1 : 0) << ',' << r.reason << '\n';
    }
}

inline void write_convergence_csv(const std::string& path, const std::vector<nfield::ConvergenceRow>& rows)
{
    auto os = detail::open_csv(path);
    write_convergence_csv(os, rows);
}

} // namespace seqdyn::io
