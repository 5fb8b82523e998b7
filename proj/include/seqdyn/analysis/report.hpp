#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "seqdyn/analysis/connectivity.hpp"
#include "seqdyn/analysis/residence.hpp"
#include "seqdyn/analysis/returns.hpp"
#include "seqdyn/analysis/tube.hpp"
#include "seqdyn/approx/diagnostics.hpp"
#include "seqdyn/approx/lift.hpp"
#include "seqdyn/lv/heteroclinic.hpp"
#include "seqdyn/lv/simulate.hpp"

namespace seqdyn::analysis {

struct AnalysisOptions {
    double start_delta = 1e-3;    // x0 = x_1 + delta e_1^u
    double t_max = 400.0;         // trained-net simulation horizon
    double target_t_max = 2000.0; // target simulation horizon (for T_g and its return intervals)
    // The learned orbit passes about 0.17 from each saddle, so 0.1-balls are never entered.
    double residence_radius = 0.3;
    double tube_radius = 0.15;
    double sample_dt = 0.1;       // time-series resolution kept in the report for plotting
    ReturnOptions returns{};
    IntegratorConfig integrator{};
};

struct TimeSeries {
    std::vector<double> t;
    std::vector<Vec> x;
};

struct AnalysisReport {
    std::string run_id;
    std::uint64_t seed = 0;
    lv::LotkaVolterra target = lv::build_lv(lv::Vec3(1, 1, 1), lv::Vec3(0.6, 0.6, 0.6));
    std::string net_checkpoint_ref;
    AnalysisOptions options;

    SectionSpec section;
    std::optional<double> T_g;                 // first return time of the target
    std::vector<double> target_return_intervals;
    bool target_strictly_increasing = false;

    std::string integration_status;
    std::vector<CrossingEvent> crossings;      // trained net, all crossings
    std::vector<double> return_intervals;      // trained net, after the transient skip
    std::optional<double> converged_period;
    std::optional<int> convergence_k;
    bool contracting = false;

    std::vector<double> residence_means;       // NaN where no complete visit
    bool residence_cyclic = false;
    double tube_fraction = 0.0;
    approx::SideConditions side_conditions;
    std::optional<Mat> block_means;

    TimeSeries net_series;
    TimeSeries target_series;

    /// The periodic-orbit acceptance conjunction for one run.
    bool periodic_orbit_accepted(double min_tube = 0.95) const
    {
        return converged_period.has_value() && contracting && tube_fraction >= min_tube &&
               side_conditions.all_nonvanishing();
    }
};

inline TimeSeries sample_uniform(const Trajectory& traj, double dt)
{
    TimeSeries s;
    if (traj.empty())
        return s;
    const auto count = static_cast<long>(std::floor((traj.t_end() - traj.t0()) / dt + 1e-9));
    for (long k = 0; k <= count; ++k) {
        const double t = traj.t0() + static_cast<double>(k) * dt;
        s.t.push_back(t);
        s.x.push_back(traj.at(t));
    }
    return s;
}

/**
 * Simulates the trained field and the target from x_1 + delta e_1^u and collects
 * the return, residence, tube and side-condition statistics of the learned orbit
 * against the target's cycle.
 */
inline AnalysisReport analyze_network(const approx::ApproxNetwork& net, const lv::LotkaVolterra& target,
                                      const AnalysisOptions& opt = {})
{
    require(net.n() == 3, "analyze_network: the network must map R^3 to R^3");
    AnalysisReport rep;
    rep.target = target;
    rep.options = opt;

    const lv::CycleReference ref = lv::heteroclinic_reference(target);
    rep.section = lv::cycle_section(target, ref);
    const Vec x0 = lv::near_saddle_start(target, 0, opt.start_delta);
    const std::vector<Vec> saddles{target.equilibrium(0), target.equilibrium(1), target.equilibrium(2)};

    IntegratorConfig tcfg = opt.integrator;
    tcfg.t_max = opt.target_t_max;
    const IntegrationResult tres = lv::simulate(target, x0, tcfg);
    rep.T_g = first_return_time(tres.trajectory, rep.section);
    ReturnOptions traw = opt.returns;
    traw.skip = 0;
    const ReturnRecord trec = detect_periodic_orbit(tres.trajectory, rep.section, traw);
    rep.target_return_intervals = trec.intervals;
    rep.target_strictly_increasing = trec.strictly_increasing();

    IntegratorConfig ncfg = opt.integrator;
    ncfg.t_max = opt.t_max;
    const IntegrationResult nres = integrate(net.field(), x0, ncfg);
    rep.integration_status = std::string(status_name(nres.status));
    const ReturnRecord rec = detect_periodic_orbit(nres.trajectory, rep.section, opt.returns);
    rep.crossings = rec.crossings;
    rep.return_intervals = rec.intervals;
    rep.converged_period = rec.converged_period;
    rep.convergence_k = rec.convergence_k;
    rep.contracting = rec.contracting;

    // statistics after the transient: from the first retained crossing on
    const double t_settled = rec.times.empty() ? nres.trajectory.t_end() : rec.times.front();
    const ResidenceProfile prof = residence_times(nres.trajectory, saddles, opt.residence_radius, t_settled);
    rep.residence_means = prof.means;
    rep.residence_cyclic = prof.cyclic_order();
    rep.tube_fraction = tube_containment(nres.trajectory, ref.points, opt.tube_radius, t_settled);
    rep.side_conditions = approx::check_side_conditions(net, target, opt.tube_radius);
    if (net.blocks())
        rep.block_means = block_connectivity_means(approx::lift(net)).means;

    rep.net_series = sample_uniform(nres.trajectory, opt.sample_dt);
    TimeSeries ts = sample_uniform(tres.trajectory, opt.sample_dt);
    // the target is plotted over the same window as the net
    while (!ts.t.empty() && ts.t.back() > opt.t_max + 1e-9) {
        ts.t.pop_back();
        ts.x.pop_back();
    }
    rep.target_series = std::move(ts);
    return rep;
}

} // namespace seqdyn::analysis
