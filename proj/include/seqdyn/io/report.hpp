#pragma once

#include <cmath>

#include "seqdyn/analysis/report.hpp"
#include "seqdyn/io/json.hpp"

namespace seqdyn::io {

namespace detail {

inline json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// NaN has no JSON spelling; it becomes null
inline json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json series_to_json(const analysis::TimeSeries& s)
{
    json x = json::array();
    for (const Vec& v : s.x)
        x.push_back(to_json(v));
    return {{"t", s.t}, {"x", x}};
}

} // namespace detail

inline json to_json(const approx::SideConditions& sc)
{
    return {{"residual_norm", sc.residual_norm},   {"unstable_push", sc.unstable_push},
            {"nonvanishing", sc.nonvanishing},     {"positivity", sc.positivity},
            {"competitive_on_tube", sc.competitive_on_tube}, {"tube_points", sc.tube_points}};
}

inline json to_json(const analysis::AnalysisOptions& o)
{
    return {{"start_delta", o.start_delta},
            {"t_max", o.t_max},
            {"target_t_max", o.target_t_max},
            {"residence_radius", o.residence_radius},
            {"tube_radius", o.tube_radius},
            {"sample_dt", o.sample_dt},
            {"return_skip", o.returns.skip},
            {"return_rel_tol", o.returns.rel_tol},
            {"return_consecutive", o.returns.consecutive},
            {"integrator", to_json(o.integrator)}};
}

/**
 * AnalysisReport JSON. The time series under "series" carry everything the plots
 * need, so figures can be regenerated from this object alone.
 */
inline json to_json(const analysis::AnalysisReport& r)
{
    json res = json::array();
    for (double m : r.residence_means)
        res.push_back(detail::number_or_null(m));
    json block = nullptr;
    if (r.block_means)
        block = to_json(*r.block_means);
    return {{"run_id", r.run_id},
            {"seed", r.seed},
            {"target_params", to_json(r.target)},
            {"net_checkpoint_ref", r.net_checkpoint_ref},
            {"options", to_json(r.options)},
            {"section", {{"point", to_json(r.section.point)}, {"normal", to_json(r.section.normal)}}},
            {"T_g", detail::optional_number(r.T_g)},
            {"target_return_intervals", r.target_return_intervals},
            {"target_strictly_increasing", r.target_strictly_increasing},
            {"integration_status", r.integration_status},
            {"return_intervals", r.return_intervals},
            {"converged_period", detail::optional_number(r.converged_period)},
            {"convergence_k", r.convergence_k ? json(*r.convergence_k) : json(nullptr)},
            {"contracting", r.contracting},
            {"crossings", to_json(r.crossings)},
            {"residence_means", res},
            {"residence_cyclic", r.residence_cyclic},
            {"tube_fraction", r.tube_fraction},
            {"side_conditions", to_json(r.side_conditions)},
            {"block_means", block},
            {"periodic_orbit_accepted", r.periodic_orbit_accepted()},
            {"series", {{"net", detail::series_to_json(r.net_series)}, {"target", detail::series_to_json(r.target_series)}}}};
}

} // namespace seqdyn::io
