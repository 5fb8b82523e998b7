// seqdyn_cli: batch driver for designing targets, running the neural-field property
// suites, training approximators and analysing the learned dynamics.
//
// Parameter precedence, lowest to highest: built-in defaults, --profile, the --config
// JSON file, explicit command-line flags. The config file holds the global keys (seed,
// out, threads, plots, profile) at top level and one object per subcommand.
//
// Exit codes: 0 success, 1 other error, 2 precondition violation (bad arguments, missing
// inputs), 3 numeric failure, 4 property-suite failure.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "seqdyn/analysis/report.hpp"
#include "seqdyn/approx/diagnostics.hpp"
#include "seqdyn/approx/fit.hpp"
#include "seqdyn/io/csv.hpp"
#include "seqdyn/io/dataset_cache.hpp"
#include "seqdyn/io/json.hpp"
#include "seqdyn/io/provenance.hpp"
#include "seqdyn/io/report.hpp"
#include "seqdyn/io/svg.hpp"
#include "seqdyn/lv/heteroclinic.hpp"
#include "seqdyn/lv/simulate.hpp"
#include "seqdyn/nfield/suites.hpp"

namespace fs = std::filesystem;
using namespace seqdyn;
using io::json;

namespace {

constexpr int kExitPrecondition = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitSuite = 4;

struct SuiteFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Globals {
    std::uint64_t seed = 1;
    std::string out = "out";
    int threads = 1;
    bool plots = false;
    std::string profile = "desk";
    std::string config;

    CLI::Option *seed_opt{}, *out_opt{}, *threads_opt{}, *plots_opt{}, *profile_opt{};
    json file = json::object();

    /// Subcommand section of the config file, or an empty object.
    json section(const std::string& name) const
    {
        return file.contains(name) ? file.at(name) : json::object();
    }
};

template <typename T>
T pick(const CLI::Option* opt, const T& flag_value, const json& section, const char* key)
{
    if ((opt && opt->count() > 0) || !section.contains(key))
        return flag_value;
    try {
        return section.at(key).get<T>();
    } catch (const json::exception& e) {
        throw PreconditionError(std::string("config: bad value for '") + key + "': " + e.what());
    }
}

void resolve_globals(Globals& g)
{
    if (!g.config.empty())
        g.file = io::read_json(g.config);
    g.seed = pick(g.seed_opt, g.seed, g.file, "seed");
    g.out = pick(g.out_opt, g.out, g.file, "out");
    g.threads = pick(g.threads_opt, g.threads, g.file, "threads");
    g.plots = pick(g.plots_opt, g.plots, g.file, "plots");
    g.profile = pick(g.profile_opt, g.profile, g.file, "profile");
    require(g.profile == "desk" || g.profile == "paper", "profile must be desk or paper");
    require(g.threads >= 1, "--threads must be >= 1");
    Eigen::setNbThreads(g.threads);
    fs::create_directories(g.out);
}

io::RunConfig run_config(const Globals& g, const std::string& command, json params)
{
    io::RunConfig rc;
    rc.command = command;
    rc.seed = g.seed;
    rc.out = g.out;
    rc.threads = g.threads;
    rc.plots = g.plots;
    rc.profile = g.profile;
    rc.params = std::move(params);
    return rc;
}

std::string out_path(const Globals& g, const std::string& name) { return (fs::path(g.out) / name).string(); }

lv::Vec3 vec3(const std::vector<double>& v, const char* what)
{
    require(v.size() == 3, std::string(what) + " needs exactly three values");
    return lv::Vec3(v[0], v[1], v[2]);
}

json series_json(const analysis::TimeSeries& s)
{
    json x = json::array();
    for (const Vec& v : s.x)
        x.push_back(io::to_json(v));
    return {{"t", s.t}, {"x", x}};
}

void write_report_plots(const json& report, const std::string& dir)
{
    if (report.contains("series") && report.at("series").contains("net")) {
        io::svg::write((fs::path(dir) / "comparison.svg").string(), io::svg::comparison(report));
        io::svg::write((fs::path(dir) / "projection.svg").string(), io::svg::projection(report));
        io::svg::write((fs::path(dir) / "heatmap.svg").string(), io::svg::heatmap(report));
    } else if (report.contains("series") && report.at("series").contains("t")) {
        io::svg::write((fs::path(dir) / "trajectory.svg").string(), io::svg::time_series(report));
    } else {
        throw PreconditionError("report: the document has no plottable series");
    }
}

// ---------------------------------------------------------------- design

struct DesignArgs {
    std::vector<double> a{1.0, 1.0, 1.0};
    std::vector<double> lambda_u{0.6, 0.6, 0.6};
    double t_max = 2000.0;
    CLI::Option *a_opt{}, *l_opt{}, *t_opt{};
};

void cmd_design(Globals& g, const DesignArgs& args)
{
    const json sec = g.section("design");
    const auto a = pick(args.a_opt, args.a, sec, "a");
    const auto l = pick(args.l_opt, args.lambda_u, sec, "lambda_u");
    const double t_max = pick(args.t_opt, args.t_max, sec, "t_max");
    const auto rc = run_config(g, "design", {{"a", a}, {"lambda_u", l}, {"t_max", t_max}});

    const auto sys = lv::build_lv(vec3(a, "--a"), vec3(l, "--lambda-u"));
    const auto sv = lv::saddle_values(sys);
    json saddles = json::array();
    for (int i = 0; i < 3; ++i) {
        const auto sp = lv::lv_jacobian_at_equilibrium(sys, i);
        saddles.push_back({{"index", i + 1},
                           {"equilibrium", io::to_json(Vec(sys.equilibrium(i)))},
                           {"eigenvalues", io::to_json(Vec(sp.eigenvalues))},
                           {"unstable_eigvec", io::to_json(Vec(sp.unstable_eigvec))},
                           {"max_imag", sp.max_imag},
                           {"nu", sv.nu[i]}});
    }
    const json stability{{"saddles", saddles},
                         {"nu_gamma", sv.product},
                         {"stable", sv.stable},
                         {"competitive_interior", lv::is_competitive(sys.field(), Box::cube(3, 0.05, 1.0), 11)}};
    io::write_json(out_path(g, "lv.json"), io::stamped(io::to_json(sys), rc));
    io::write_json(out_path(g, "stability.json"), io::stamped(stability, rc));
    std::cout << "nu(Gamma) = " << sv.product << (sv.stable ? "  stable" : "  not stable") << '\n';

    if (g.plots) {
        IntegratorConfig cfg;
        cfg.t_max = t_max;
        const auto res = lv::simulate(sys, lv::near_saddle_start(sys, 0, 1e-3), cfg);
        const json doc = io::stamped({{"title", "target, start near saddle 1"},
                                      {"series", series_json(analysis::sample_uniform(res.trajectory, 0.5))}},
                                     rc);
        io::write_json(out_path(g, "target_series.json"), doc);
        io::svg::write(out_path(g, "trajectory.svg"), io::svg::time_series(doc));
    }
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
    std::vector<int> n{3};
    int draws = 100;
    int points = 500;
    int trajectories = 10;
    std::vector<std::string> suites{"lyapunov", "spectral", "perturbation"};
    CLI::Option *n_opt{}, *d_opt{}, *p_opt{}, *t_opt{}, *s_opt{};
};

void cmd_verify(Globals& g, const VerifyArgs& args)
{
    const json sec = g.section("verify");
    const auto dims = pick(args.n_opt, args.n, sec, "n");
    const int draws = pick(args.d_opt, args.draws, sec, "draws");
    const int points = pick(args.p_opt, args.points, sec, "points");
    const int trajectories = pick(args.t_opt, args.trajectories, sec, "trajectories");
    const auto suites = pick(args.s_opt, args.suites, sec, "suites");
    require(draws >= 0, "--draws must be >= 0");
    auto has = [&](const char* s) { return std::find(suites.begin(), suites.end(), s) != suites.end(); };
    for (const auto& s : suites)
        require(s == "lyapunov" || s == "spectral" || s == "perturbation", "unknown suite '" + s + "'");
    const auto rc = run_config(g, "verify",
                               {{"n", dims}, {"draws", draws}, {"points", points},
                                {"trajectories", trajectories}, {"suites", suites}});

    json per_n = json::array();
    json all = json::array();
    int failures = 0;
    for (int n : dims) {
        require(n >= 3, "--n must be >= 3");
        int failed_here = 0;
        std::optional<std::vector<nfield::ConvergenceRow>> table;
        for (int k = 0; k < draws; ++k) {
            const auto d = nfield::random_axial_draw(n, nfield::draw_seed(g.seed, n, k));
            const auto sys = nfield::build_axial(d.a, d.b);
            json rec{{"n", n}, {"draw", k}, {"seed", d.seed}, {"a", io::to_json(d.a)}, {"b", io::to_json(d.b)}};
            bool ok = true;
            if (has("lyapunov")) {
                nfield::LyapunovSuiteOptions lo;
                lo.points = points;
                lo.trajectories = trajectories;
                const auto r = nfield::lyapunov_suite(sys, d.seed, lo);
                rec["lyapunov"] = {{"points", r.points},
                                   {"max_derivative", r.points ? json(r.max_derivative) : json(nullptr)},
                                   {"derivative_violations", r.derivative_violations},
                                   {"strictness_violations", r.strictness_violations},
                                   {"form_disagreements", r.form_disagreements},
                                   {"trajectories", r.trajectories},
                                   {"monotonicity_violations", r.monotonicity_violations},
                                   {"visit_violations", r.visit_violations},
                                   {"integration_failures", r.integration_failures},
                                   {"passed", r.passed()}};
                ok = ok && r.passed();
            }
            if (has("spectral")) {
                const auto r = nfield::spectral_suite(sys);
                rec["spectral"] = {{"equilibria", r.equilibria},
                                   {"min_positive", r.min_positive},
                                   {"count_violations", r.count_violations},
                                   {"imag_violations", r.imag_violations},
                                   {"secular_mismatches", r.secular_mismatches},
                                   {"max_secular_gap", r.max_secular_gap},
                                   {"passed", r.passed()}};
                ok = ok && r.passed();
            }
            if (has("perturbation")) {
                nfield::PerturbationSuiteOptions po;
                po.res = nfield::perturbation_grid_res(n);
                const auto r = nfield::perturbation_suite(d.a, d.b, d.seed, po);
                json rows = json::array();
                for (const auto& row : r.rows)
                    rows.push_back({{"eps", row.eps},
                                    {"sup_value", row.sup_value},
                                    {"sup_jacobian", row.sup_jacobian},
                                    {"valid", row.valid},
                                    {"reason", row.reason}});
                json residuals = json::array();
                for (double v : r.residuals)
                    residuals.push_back(std::isfinite(v) ? json(v) : json(nullptr));
                rec["perturbation"] = {{"grid_res", po.res},
                                       {"rows", rows},
                                       {"ratios", r.ratios},
                                       {"residuals", residuals},
                                       {"monotone", r.monotone},
                                       {"ratios_in_band", r.ratios_in_band},
                                       {"largest_eps_v_decreasing", r.largest_eps_v_decreasing},
                                       {"passed", r.passed()}};
                ok = ok && r.passed();
                if (!table)
                    table = r.rows;
            }
            rec["passed"] = ok;
            if (!ok)
                ++failed_here;
            all.push_back(std::move(rec));
        }
        if (table)
            io::write_convergence_csv(out_path(g, "convergence_n" + std::to_string(n) + ".csv"), *table);
        per_n.push_back({{"n", n}, {"draws", draws}, {"failures", failed_here}});
        std::cout << "n=" << n << "  draws=" << draws << "  failures=" << failed_here << '\n';
        failures += failed_here;
    }
    io::write_json(out_path(g, "verify.json"),
                   io::stamped({{"summary", per_n}, {"failures", failures}, {"passed", failures == 0}, {"draws", all}},
                               rc));
    if (failures > 0)
        throw SuiteFailure(std::to_string(failures) + " draw(s) failed a hard invariant; see verify.json");
}

// ---------------------------------------------------------------- train

struct TrainArgs {
    std::vector<double> a{1.0, 1.0, 1.0};
    std::vector<double> lambda_u{0.6, 0.6, 0.6};
    int hidden = 45;
    std::vector<int> blocks{15, 15, 15};
    bool dense = false;
    int epochs = 0;
    int dataset_size = 0;
    int batch_size = 0;
    double learning_rate = 0.0;
    double lr_decay = 0.0;
    double jacobian_penalty = 0.0;
    double inward_penalty = 0.0;
    int grid_res = 41;
    std::string dataset_cache;
    CLI::Option *a_opt{}, *l_opt{}, *h_opt{}, *b_opt{}, *dense_opt{}, *e_opt{}, *ds_opt{}, *bs_opt{}, *lr_opt{},
        *dec_opt{}, *jw_opt{}, *iw_opt{}, *g_opt{}, *cache_opt{};
};

void cmd_train(Globals& g, const TrainArgs& args)
{
    const json sec = g.section("train");
    const auto a = pick(args.a_opt, args.a, sec, "a");
    const auto l = pick(args.l_opt, args.lambda_u, sec, "lambda_u");
    const int hidden = pick(args.h_opt, args.hidden, sec, "hidden");
    const bool dense = pick(args.dense_opt, args.dense, sec, "dense");
    const auto blocks_list = pick(args.b_opt, args.blocks, sec, "blocks");
    const int grid_res = pick(args.g_opt, args.grid_res, sec, "grid_res");
    const auto cache = pick(args.cache_opt, args.dataset_cache, sec, "dataset_cache");

    approx::TrainConfig cfg = g.profile == "paper" ? approx::TrainConfig::paper() : approx::TrainConfig::desk();
    if (sec.contains("config"))
        cfg = io::train_config_from_json(sec.at("config"), cfg);
    if (args.e_opt->count())
        cfg.epochs = args.epochs;
    if (args.ds_opt->count())
        cfg.dataset_size = args.dataset_size;
    if (args.bs_opt->count())
        cfg.batch_size = args.batch_size;
    if (args.lr_opt->count())
        cfg.learning_rate = args.learning_rate;
    if (args.dec_opt->count())
        cfg.lr_decay = args.lr_decay;
    if (args.jw_opt->count())
        cfg.jacobian_penalty_weight = args.jacobian_penalty;
    if (args.iw_opt->count())
        cfg.inward_penalty_weight = args.inward_penalty;
    cfg.seed = g.seed;
    cfg.validate();

    const auto target = lv::build_lv(vec3(a, "--a"), vec3(l, "--lambda-u"));
    std::optional<std::vector<int>> blocks;
    if (!dense)
        blocks = blocks_list;
    const json net_config{{"train", io::to_json(cfg)},
                          {"target", io::to_json(target)},
                          {"hidden", hidden},
                          {"blocks", blocks ? json(*blocks) : json(nullptr)}};
    const auto rc = run_config(g, "train", {{"net_config", net_config}, {"grid_res", grid_res}, {"dataset_cache", cache}});

    const auto t0 = std::chrono::steady_clock::now();
    std::optional<approx::Dataset> data;
    if (!cache.empty() && fs::exists(cache)) {
        data = io::read_dataset(cache);
        require(data->seed == cfg.seed && data->dim() == 3 && data->size() == cfg.dataset_size,
                cache + ": cached dataset does not match the seed, dimension or size of this run");
    } else {
        data = approx::sample_dataset(target.field(), cfg.domain, cfg.dataset_size, cfg.seed);
        if (!cache.empty())
            io::write_dataset(cache, *data);
    }
    const auto res = approx::fit_target(target, cfg, hidden, blocks, &*data);
    const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    {
        std::ofstream os(out_path(g, "loss.csv"));
        os << std::setprecision(17) << "epoch,train_mse,val_mse\n";
        for (std::size_t e = 0; e < res.train_mse.size(); ++e) {
            os << e << ',' << res.train_mse[e] << ',';
            if (e < res.val_mse.size())
                os << res.val_mse[e];
            os << '\n';
        }
    }
    json summary{{"status", approx::status_name(res.status)},
                 {"epochs_run", res.epochs_run},
                 {"best_epoch", res.best_epoch},
                 {"final_mse", std::isfinite(res.final_mse) ? json(res.final_mse) : json(nullptr)},
                 {"message", res.message},
                 {"runtime_s", runtime}};
    if (res.status == approx::TrainStatus::diverged) {
        io::write_json(out_path(g, "train_summary.json"), io::stamped(summary, rc));
        throw NumericError("training diverged: " + res.message + " (loss trace kept in loss.csv)");
    }
    const double sup = approx::sup_value_error(res.net, target.field(), cfg.domain, grid_res);
    summary["sup_value_error"] = sup;
    summary["grid_res"] = grid_res;
    io::write_json(out_path(g, "checkpoint.json"), io::stamped(io::checkpoint_to_json(res.net, cfg.seed, net_config), rc));
    io::write_json(out_path(g, "train_summary.json"), io::stamped(summary, rc));
    std::cout << approx::status_name(res.status) << " after " << res.epochs_run << " epochs, mse " << res.final_mse
              << ", sup error " << sup << " on a " << grid_res << "^3 grid, " << runtime << " s\n";
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string system;
    std::vector<double> a{1.0, 1.0, 1.0};
    std::vector<double> lambda_u{0.6, 0.6, 0.6};
    std::vector<double> x0;
    double delta = 1e-3;
    double t_max = 400.0;
    double sample_dt = 0.1;
    CLI::Option *sys_opt{}, *a_opt{}, *l_opt{}, *x0_opt{}, *d_opt{}, *t_opt{}, *dt_opt{};
};

void cmd_simulate(Globals& g, const SimulateArgs& args)
{
    const json sec = g.section("simulate");
    const auto system = pick(args.sys_opt, args.system, sec, "system");
    const auto a = pick(args.a_opt, args.a, sec, "a");
    const auto l = pick(args.l_opt, args.lambda_u, sec, "lambda_u");
    const auto x0_list = pick(args.x0_opt, args.x0, sec, "x0");
    const double delta = pick(args.d_opt, args.delta, sec, "delta");
    const double t_max = pick(args.t_opt, args.t_max, sec, "t_max");
    const double sample_dt = pick(args.dt_opt, args.sample_dt, sec, "sample_dt");
    require(sample_dt > 0.0, "--sample-dt must be positive");

    IntegratorConfig icfg;
    if (sec.contains("integrator"))
        icfg = io::integrator_config_from_json(sec.at("integrator"), icfg);
    icfg.t_max = t_max;
    icfg.validate();
    const auto rc = run_config(g, "simulate",
                               {{"system", system}, {"a", a}, {"lambda_u", l}, {"x0", x0_list}, {"delta", delta},
                                {"sample_dt", sample_dt}, {"integrator", io::to_json(icfg)}});

    // target LV: the system itself, the checkpoint's training target, or --a/--lambda-u
    std::optional<lv::LotkaVolterra> target;
    std::string title;
    IntegrationResult res;
    auto start = [&](int dim) -> Vec {
        if (!x0_list.empty()) {
            require(static_cast<int>(x0_list.size()) == dim, "--x0 has the wrong dimension");
            return Eigen::Map<const Vec>(x0_list.data(), dim);
        }
        require(target.has_value(), "--x0 is required for this system");
        return lv::near_saddle_start(*target, 0, delta);
    };

    json doc = system.empty() ? json(nullptr) : io::read_json(system);
    if (doc.is_null() || doc.value("kind", "") == "lotka_volterra") {
        target = doc.is_null() ? lv::build_lv(vec3(a, "--a"), vec3(l, "--lambda-u")) : io::lv_from_json(doc);
        title = "Lotka-Volterra target";
        res = lv::simulate(*target, start(3), icfg);
    } else if (doc.contains("P")) {
        const auto net = io::network_from_json(doc);
        if (doc.contains("config") && doc.at("config").contains("target"))
            target = io::lv_from_json(doc.at("config").at("target"));
        else if (net.n() == 3)
            target = lv::build_lv(vec3(a, "--a"), vec3(l, "--lambda-u"));
        title = "trained network";
        res = integrate(net.field(), start(net.n()), icfg);
    } else if (doc.contains("W") && doc.contains("X")) {
        const auto sys = io::nfield_from_json(doc);
        title = "neural field, n = " + std::to_string(sys.dim());
        res = integrate(sys.field(), start(sys.dim()), icfg);
    } else {
        throw PreconditionError(system + ": not a Lotka-Volterra, checkpoint or neural-field document");
    }
    if (!res.ok())
        throw NumericError("integration failed: " + res.message);

    std::vector<CrossingEvent> events;
    json section = nullptr;
    if (target && res.trajectory.dim() == 3) {
        const auto ref = lv::heteroclinic_reference(*target);
        const SectionSpec spec = lv::cycle_section(*target, ref);
        events = detect_crossings(res.trajectory, spec);
        section = {{"point", io::to_json(spec.point)}, {"normal", io::to_json(spec.normal)}};
    }
    io::write_trajectory_csv(out_path(g, "trajectory.csv"), res.trajectory);
    io::write_crossings_csv(out_path(g, "crossings.csv"), events);
    io::write_json(out_path(g, "events.json"),
                   io::stamped({{"section", section}, {"events", io::to_json(events)}}, rc));
    const json series = io::stamped(
        {{"title", title}, {"series", series_json(analysis::sample_uniform(res.trajectory, sample_dt))}}, rc);
    io::write_json(out_path(g, "series.json"), series);
    if (g.plots)
        io::svg::write(out_path(g, "trajectory.svg"), io::svg::time_series(series));
    std::cout << res.trajectory.size() << " steps to t = " << res.trajectory.t_end() << ", " << events.size()
              << " section crossings\n";
}

// ---------------------------------------------------------------- analyze

struct AnalyzeArgs {
    std::string checkpoint;
    std::vector<double> a;
    std::vector<double> lambda_u;
    std::string run_id;
    analysis::AnalysisOptions opt;
    CLI::Option *c_opt{}, *a_opt{}, *l_opt{}, *id_opt{}, *t_opt{}, *tt_opt{}, *rr_opt{}, *tr_opt{}, *dt_opt{}, *d_opt{};
};

void cmd_analyze(Globals& g, const AnalyzeArgs& args)
{
    const json sec = g.section("analyze");
    const auto checkpoint = pick(args.c_opt, args.checkpoint, sec, "checkpoint");
    require(!checkpoint.empty(), "--checkpoint is required");
    auto a = pick(args.a_opt, args.a, sec, "a");
    auto l = pick(args.l_opt, args.lambda_u, sec, "lambda_u");
    analysis::AnalysisOptions opt = args.opt;
    opt.start_delta = pick(args.d_opt, opt.start_delta, sec, "start_delta");
    opt.t_max = pick(args.t_opt, opt.t_max, sec, "t_max");
    opt.target_t_max = pick(args.tt_opt, opt.target_t_max, sec, "target_t_max");
    opt.residence_radius = pick(args.rr_opt, opt.residence_radius, sec, "residence_radius");
    opt.tube_radius = pick(args.tr_opt, opt.tube_radius, sec, "tube_radius");
    opt.sample_dt = pick(args.dt_opt, opt.sample_dt, sec, "sample_dt");
    require(opt.t_max > 0.0 && opt.target_t_max > 0.0 && opt.sample_dt > 0.0, "analysis horizons must be positive");

    const json ck = io::read_json(checkpoint);
    const auto net = io::network_from_json(ck);
    lv::LotkaVolterra target = lv::build_lv(lv::Vec3(1, 1, 1), lv::Vec3(0.6, 0.6, 0.6));
    if (!l.empty() || !a.empty()) {
        if (a.empty())
            a = {1.0, 1.0, 1.0};
        require(!l.empty(), "--lambda-u is required when --a is given");
        target = lv::build_lv(vec3(a, "--a"), vec3(l, "--lambda-u"));
    } else if (ck.contains("config") && ck.at("config").contains("target")) {
        target = io::lv_from_json(ck.at("config").at("target"));
    }
    const std::string run_id = pick(args.id_opt, args.run_id, sec, "run_id");
    const auto rc = run_config(g, "analyze",
                               {{"checkpoint", checkpoint}, {"target", io::to_json(target)},
                                {"run_id", run_id}, {"options", io::to_json(opt)}});

    auto rep = analysis::analyze_network(net, target, opt);
    rep.run_id = run_id.empty() ? fs::path(checkpoint).stem().string() : run_id;
    rep.seed = ck.value("seed", std::uint64_t{0});
    rep.net_checkpoint_ref = checkpoint;
    const json report = io::stamped(io::to_json(rep), rc);
    io::write_json(out_path(g, "report.json"), report);
    io::write_crossings_csv(out_path(g, "crossings.csv"), rep.crossings);
    if (g.plots)
        write_report_plots(report, g.out);

    std::cout << "period ";
    if (rep.converged_period)
        std::cout << *rep.converged_period;
    else
        std::cout << "none";
    std::cout << ", contracting " << rep.contracting << ", tube " << rep.tube_fraction << ", accepted "
              << rep.periodic_orbit_accepted() << '\n';
}

// ---------------------------------------------------------------- report

void cmd_report(Globals& g, const std::string& report_path)
{
    require(!report_path.empty(), "--report is required");
    write_report_plots(io::read_json(report_path), g.out);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"seqdyn: heteroclinic-cycle targets, neural-field certificates, learned vector fields"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    g.seed_opt = app.add_option("--seed", g.seed, "Global RNG seed");
    g.out_opt = app.add_option("--out", g.out, "Output directory");
    g.threads_opt = app.add_option("--threads", g.threads, "Thread cap");
    g.plots_opt = app.add_flag("--plots", g.plots, "Write SVG plots");
    g.profile_opt = app.add_option("--profile", g.profile, "Training profile")->check(CLI::IsMember({"desk", "paper"}));
    app.add_option("--config", g.config, "Run configuration JSON")->check(CLI::ExistingFile);

    std::function<void()> run;

    DesignArgs da;
    auto* design = app.add_subcommand("design", "Build a Lotka-Volterra target and report its stability");
    da.a_opt = design->add_option("--a", da.a, "Saddle amplitudes a_1,a_2,a_3")->delimiter(',')->expected(3);
    da.l_opt = design->add_option("--lambda-u", da.lambda_u, "Unstable eigenvalues")->delimiter(',')->expected(3);
    da.t_opt = design->add_option("--t-max", da.t_max, "Horizon of the plotted target orbit");
    design->callback([&] { run = [&] { cmd_design(g, da); }; });

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "Run the neural-field property suites over random draws");
    va.n_opt = verify->add_option("--n", va.n, "Dimensions")->delimiter(',');
    va.d_opt = verify->add_option("--draws", va.draws, "Random systems per dimension");
    va.p_opt = verify->add_option("--points", va.points, "dV/dt sample points per system");
    va.t_opt = verify->add_option("--trajectories", va.trajectories, "Trajectories per system");
    va.s_opt = verify->add_option("--suites", va.suites, "lyapunov,spectral,perturbation")->delimiter(',');
    verify->callback([&] { run = [&] { cmd_verify(g, va); }; });

    TrainArgs ta;
    auto* train = app.add_subcommand("train", "Fit the one-hidden-layer approximator to a target");
    ta.a_opt = train->add_option("--a", ta.a, "Target amplitudes")->delimiter(',')->expected(3);
    ta.l_opt = train->add_option("--lambda-u", ta.lambda_u, "Target unstable eigenvalues")->delimiter(',')->expected(3);
    ta.h_opt = train->add_option("--hidden", ta.hidden, "Hidden width N");
    ta.b_opt = train->add_option("--blocks", ta.blocks, "Block layout of P")->delimiter(',');
    ta.dense_opt = train->add_flag("--dense", ta.dense, "Dense P (no block layout)");
    ta.e_opt = train->add_option("--epochs", ta.epochs, "Epochs");
    ta.ds_opt = train->add_option("--dataset-size", ta.dataset_size, "Samples D");
    ta.bs_opt = train->add_option("--batch-size", ta.batch_size, "Minibatch size");
    ta.lr_opt = train->add_option("--learning-rate", ta.learning_rate, "Adam step size");
    ta.dec_opt = train->add_option("--lr-decay", ta.lr_decay, "Per-epoch step decay");
    ta.jw_opt = train->add_option("--jacobian-penalty", ta.jacobian_penalty, "Jacobian penalty weight");
    ta.iw_opt = train->add_option("--inward-penalty", ta.inward_penalty, "Inward face penalty weight");
    ta.g_opt = train->add_option("--grid-res", ta.grid_res, "Grid nodes per axis for the sup error");
    ta.cache_opt = train->add_option("--dataset-cache", ta.dataset_cache, "Binary dataset cache (read if present)");
    train->callback([&] { run = [&] { cmd_train(g, ta); }; });

    SimulateArgs sa;
    auto* simulate = app.add_subcommand("simulate", "Integrate a target, checkpoint or neural-field system");
    sa.sys_opt = simulate->add_option("--system", sa.system, "System JSON (default: LV from --a/--lambda-u)");
    sa.a_opt = simulate->add_option("--a", sa.a, "LV amplitudes")->delimiter(',')->expected(3);
    sa.l_opt = simulate->add_option("--lambda-u", sa.lambda_u, "LV unstable eigenvalues")->delimiter(',')->expected(3);
    sa.x0_opt = simulate->add_option("--x0", sa.x0, "Initial state (default: near saddle 1)")->delimiter(',');
    sa.d_opt = simulate->add_option("--delta", sa.delta, "Offset along the unstable direction of saddle 1");
    sa.t_opt = simulate->add_option("--t-max", sa.t_max, "Horizon");
    sa.dt_opt = simulate->add_option("--sample-dt", sa.sample_dt, "Spacing of the plotted series");
    simulate->callback([&] { run = [&] { cmd_simulate(g, sa); }; });

    AnalyzeArgs aa;
    auto* analyze = app.add_subcommand("analyze", "Return-map, residence and tube analysis of a checkpoint");
    aa.c_opt = analyze->add_option("--checkpoint", aa.checkpoint, "Checkpoint JSON");
    aa.a_opt = analyze->add_option("--a", aa.a, "Target amplitudes (default: the checkpoint's)")->delimiter(',')->expected(3);
    aa.l_opt = analyze->add_option("--lambda-u", aa.lambda_u, "Target unstable eigenvalues")->delimiter(',')->expected(3);
    aa.id_opt = analyze->add_option("--run-id", aa.run_id, "Run identifier (default: checkpoint file stem)");
    aa.d_opt = analyze->add_option("--start-delta", aa.opt.start_delta, "Initial offset from saddle 1");
    aa.t_opt = analyze->add_option("--t-max", aa.opt.t_max, "Network horizon");
    aa.tt_opt = analyze->add_option("--target-t-max", aa.opt.target_t_max, "Target horizon");
    aa.rr_opt = analyze->add_option("--residence-radius", aa.opt.residence_radius, "Saddle ball radius");
    aa.tr_opt = analyze->add_option("--tube-radius", aa.opt.tube_radius, "Tube radius");
    aa.dt_opt = analyze->add_option("--sample-dt", aa.opt.sample_dt, "Spacing of the plotted series");
    analyze->callback([&] { run = [&] { cmd_analyze(g, aa); }; });

    std::string report_path;
    auto* report = app.add_subcommand("report", "Regenerate SVG plots from a report or series JSON");
    report->add_option("--report", report_path, "report.json or series.json")->check(CLI::ExistingFile);
    report->callback([&] { run = [&] { cmd_report(g, report_path); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitPrecondition;
    }

    try {
        resolve_globals(g);
        run();
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitPrecondition;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const SuiteFailure& e) {
        std::cerr << "property suite failed: " << e.what() << '\n';
        return kExitSuite;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
