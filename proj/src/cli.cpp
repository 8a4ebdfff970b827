#include "seloqr/cli.hpp"

#include "seloqr/inference.hpp"
#include "seloqr/io.hpp"
#include "seloqr/model_core.hpp"
#include "seloqr/version.hpp"

#include <nlohmann/json.hpp>

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

namespace seloqr {

namespace {

using json = nlohmann::ordered_json;

json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json to_json(const Vector& v) {
    std::vector<double> out(v.data(), v.data() + v.size());
    return json(out);
}

json to_json(const IndexSet& s) { return json(s.members()); }

std::string init_name(InitPolicy p) { return p == InitPolicy::zeros ? "zeros" : "l1_warm"; }

std::string sn_policy_name(SnPolicy p) {
    switch (p) {
        case SnPolicy::fixed:
            return "fixed";
        case SnPolicy::formula:
            return "formula";
        default:
            return "automatic";
    }
}

ErrorKind parse_error_kind(const std::string& s) {
    if (s == "normal") return ErrorKind::normal;
    if (s == "student_t") return ErrorKind::student_t;
    if (s == "laplace") return ErrorKind::laplace;
    if (s == "cauchy") return ErrorKind::cauchy;
    throw contract_error("unknown error distribution '" + s + "'");
}

DesignKind parse_design_kind(const std::string& s) {
    if (s == "gaussian_iid") return DesignKind::gaussian_iid;
    if (s == "gaussian_correlated") return DesignKind::gaussian_correlated;
    throw contract_error("unknown design '" + s + "'");
}

double data_scale(const Dataset& ds, QuantileLevel tau) {
    double q = 0.0;
    for (Index i = 0; i < ds.n(); ++i) q += check_loss(ds.y()[i], tau);
    return std::max(q / static_cast<double>(ds.n()), 1e-8);
}

std::string companion_path(const std::string& output, const std::string& suffix) {
    const std::filesystem::path p(output);
    std::filesystem::path q = p.parent_path();
    q /= p.stem().string() + "_" + suffix + ".csv";
    return q.string();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write '" + path + "'");
    out << text;
    if (!out) throw data_error("write to '" + path + "' failed");
}

json tolerance_block(const RunConfig& cfg) {
    json t;
    t["obj_tol"] = cfg.fit.obj_tol;
    t["zero_tol"] = cfg.fit.zero_tol;
    t["inner_sweep_tol"] = kInnerSweepTol;
    t["loss_floor"] = cfg.bic.loss_floor;
    t["sigma_eig_rel_tol"] = kSigmaEigRelTol;
    return t;
}

json config_echo(const RunConfig& cfg, std::optional<double> lambda_eff,
                 std::optional<double> gamma_eff) {
    json c;
    c["input"] = cfg.input;
    c["output"] = cfg.output;
    c["tau"] = cfg.tau;
    c["lambda"] = lambda_eff ? json(*lambda_eff) : json(nullptr);
    c["gamma"] = gamma_eff ? json(*gamma_eff) : json(nullptr);
    c["seed"] = cfg.seed;
    json f;
    f["max_outer"] = cfg.fit.max_outer;
    f["max_sweeps"] = cfg.fit.max_sweeps;
    f["obj_tol"] = cfg.fit.obj_tol;
    f["zero_tol"] = cfg.fit.zero_tol;
    f["init"] = init_name(cfg.fit.init);
    c["fit"] = f;
    json b;
    b["sn_policy"] = sn_policy_name(cfg.bic.sn_policy);
    b["sn_fixed"] = cfg.bic.sn_fixed;
    b["a_exponent"] = cfg.bic.a_exponent;
    b["c_cap"] = cfg.bic.c_cap;
    b["loss_floor"] = cfg.bic.loss_floor;
    b["lambda_grid"] = json(cfg.bic.lambda_grid);
    b["gamma_grid"] = json(cfg.bic.gamma_grid);
    c["bic"] = b;
    return c;
}

void emit_report(const RunConfig& cfg, json report) {
    if (cfg.output.empty()) {
        std::cout << report.dump(2) << "\n";
        return;
    }
    write_text(cfg.output, report.dump(2) + "\n");
}

json score_json(const BicScore& s) {
    json j;
    j["lambda"] = s.lambda;
    j["gamma"] = s.gamma;
    j["bic"] = s.value;
    j["mean_loss"] = s.mean_loss;
    j["k_nonzero"] = s.k_nonzero;
    j["feasible"] = s.feasible;
    return j;
}

json metrics_summary(const OracleMetrics& m) {
    json j;
    j["reps_completed"] = m.reps_completed;
    j["solver_failures"] = m.solver_failures;
    j["exact_recovery_rate"] = m.exact_recovery_rate;
    j["tpr"] = m.tpr;
    j["fpr"] = m.fpr;
    j["median_l2"] = num_or_null(m.median_l2);
    j["z_count"] = static_cast<Index>(m.z_samples.size());
    j["z_skipped"] = m.z_skipped;
    j["ks_to_normal"] = num_or_null(m.ks_to_normal);
    j["ci_coverage"] = num_or_null(m.ci_coverage);
    j["ci_count"] = m.ci_count;
    j["bic_recovery_rate"] = num_or_null(m.bic_recovery_rate);
    return j;
}

int cmd_fit(const RunConfig& cfg) {
    if (cfg.input.empty()) throw contract_error("fit requires --input");
    const QuantileLevel tau(cfg.tau);
    const Dataset ds = read_csv(cfg.input);
    const double lambda = cfg.lambda ? *cfg.lambda : 0.1 * data_scale(ds, tau);
    const double gamma =
        cfg.gamma ? *cfg.gamma
                  : 10.0 * std::sqrt(static_cast<double>(ds.d())) *
                        std::pow(static_cast<double>(ds.n()), -1.5);
    const SeloTuning t(lambda, gamma);
    FitConfig fit_cfg = cfg.fit;
    fit_cfg.threads = cfg.threads;
    const FitResult fr = fit(ds, tau, t, fit_cfg);

    double mean_loss = 0.0;
    for (Index i = 0; i < ds.n(); ++i) mean_loss += check_loss(fr.residuals[i], tau);
    mean_loss /= static_cast<double>(ds.n());

    json report;
    report["command"] = "fit";
    report["config"] = config_echo(cfg, lambda, gamma);
    json res;
    res["beta_hat"] = to_json(fr.beta_hat);
    res["active_set"] = to_json(fr.active_set);
    res["k_nonzero"] = static_cast<Index>(fr.active_set.size());
    res["objective"] = fr.objective;
    res["mean_loss"] = mean_loss;
    res["converged"] = fr.converged;
    res["outer_iters"] = fr.outer_iters;
    report["result"] = res;
    json diag;
    diag["n"] = ds.n();
    diag["d"] = ds.d();
    diag["tolerances"] = tolerance_block(cfg);
    diag["objective_trace"] = json(fr.objective_trace);
    report["diagnostics"] = diag;
    report["version"] = kVersion;
    emit_report(cfg, std::move(report));
    return 0;
}

int cmd_select(const RunConfig& cfg) {
    if (cfg.input.empty()) throw contract_error("select requires --input");
    const QuantileLevel tau(cfg.tau);
    const Dataset ds = read_csv(cfg.input);
    FitConfig fit_cfg = cfg.fit;
    fit_cfg.threads = cfg.threads;
    const SelectionResult sel = select(ds, tau, cfg.bic, fit_cfg);

    json report;
    report["command"] = "select";
    report["config"] = config_echo(cfg, cfg.lambda, cfg.gamma);
    json res;
    res["best"] = score_json(sel.best);
    res["beta_hat"] = to_json(sel.best_fit.beta_hat);
    res["active_set"] = to_json(sel.best_fit.active_set);
    res["k_nonzero"] = static_cast<Index>(sel.best_fit.active_set.size());
    res["sn"] = sel.sn;
    res["cardinality_cap"] = sel.cap;
    res["excluded_cells"] = sel.excluded;
    json board = json::array();
    for (const BicScore& s : sel.scoreboard) board.push_back(score_json(s));
    res["scoreboard"] = board;
    report["result"] = res;
    json diag;
    diag["n"] = ds.n();
    diag["d"] = ds.d();
    diag["lambda_grid"] = json(sel.lambda_grid);
    diag["gamma_grid"] = json(sel.gamma_grid);
    diag["tolerances"] = tolerance_block(cfg);
    report["diagnostics"] = diag;
    report["version"] = kVersion;

    if (!cfg.output.empty()) {
        std::string csv = "lambda,gamma,bic,mean_loss,k_nonzero,feasible\n";
        for (const BicScore& s : sel.scoreboard) {
            csv += format_double(s.lambda) + "," + format_double(s.gamma) + "," +
                   format_double(s.value) + "," + format_double(s.mean_loss) + "," +
                   std::to_string(s.k_nonzero) + "," + (s.feasible ? "1" : "0") + "\n";
        }
        write_text(companion_path(cfg.output, "scoreboard"), csv);
    }
    emit_report(cfg, std::move(report));
    return 0;
}

SimScenario build_scenario(const RunConfig& cfg, Index n) {
    SimScenario sc;
    sc.n = n;
    sc.d = cfg.sim_d > 0
               ? cfg.sim_d
               : static_cast<Index>(std::floor(2.0 * std::pow(static_cast<double>(n), 0.4)));
    std::vector<double> pattern = cfg.sim_beta;
    if (pattern.empty()) pattern = {2.0, -2.0, 1.5};
    if (static_cast<Index>(pattern.size()) > sc.d)
        throw contract_error("simulate: beta pattern is longer than d");
    sc.beta0 = Vector::Zero(sc.d);
    for (std::size_t k = 0; k < pattern.size(); ++k)
        sc.beta0[static_cast<Index>(k)] = pattern[k];
    sc.error = make_error_dist(parse_error_kind(cfg.sim_error), cfg.sim_error_param,
                               QuantileLevel(cfg.tau));
    sc.design = parse_design_kind(cfg.sim_design);
    sc.design_rho = cfg.sim_rho;
    sc.seed = cfg.seed;
    sc.reps = cfg.sim_reps;
    return sc;
}

json scenario_echo(const SimScenario& sc, const RunConfig& cfg) {
    json s;
    s["n"] = sc.n;
    s["d"] = sc.d;
    s["reps"] = sc.reps;
    s["beta0"] = to_json(sc.beta0);
    s["error"] = cfg.sim_error;
    s["error_param"] = sc.error.param;
    s["error_shift"] = sc.error.shift;
    s["error_f0"] = sc.error.f0;
    s["design"] = cfg.sim_design;
    s["design_rho"] = sc.design_rho;
    s["with_selection"] = cfg.with_selection;
    s["ci_level"] = cfg.ci_level;
    return s;
}

int cmd_simulate(const RunConfig& cfg) {
    const QuantileLevel tau(cfg.tau);
    FitConfig fit_cfg = cfg.fit;
    fit_cfg.threads = cfg.threads;
    RunOptions opts;
    opts.with_selection = cfg.with_selection;
    opts.ci_level = cfg.ci_level;
    if (cfg.lambda && cfg.gamma) opts.tuning = SeloTuning(*cfg.lambda, *cfg.gamma);

    std::vector<Index> ladder = cfg.n_ladder;
    if (ladder.empty()) ladder = {cfg.sim_n};
    for (Index n : ladder)
        if (n < 2) throw contract_error("simulate: ladder entries must be >= 2");

    json rate_rows = json::array();
    std::string rate_csv = "n,d,alpha_n,median_l2,exact_recovery_rate\n";
    OracleMetrics last;
    SimScenario last_sc;
    for (Index n : ladder) {
        const SimScenario sc = build_scenario(cfg, n);
        const OracleMetrics m = run_replications(sc, fit_cfg, cfg.bic, opts);
        const double alpha =
            std::sqrt(static_cast<double>(sc.d) / static_cast<double>(sc.n));
        json row;
        row["n"] = sc.n;
        row["d"] = sc.d;
        row["alpha_n"] = alpha;
        row["median_l2"] = num_or_null(m.median_l2);
        row["exact_recovery_rate"] = m.exact_recovery_rate;
        rate_rows.push_back(row);
        rate_csv += format_double(static_cast<double>(sc.n)) + "," +
                    format_double(static_cast<double>(sc.d)) + "," + format_double(alpha) +
                    "," + format_double(m.median_l2) + "," +
                    format_double(m.exact_recovery_rate) + "\n";
        last = m;
        last_sc = sc;
    }

    // least-squares slope of log median error on log alpha_n
    json slope_json(nullptr);
    {
        std::vector<double> xs, ys;
        for (const auto& row : rate_rows) {
            const double a = row["alpha_n"].get<double>();
            if (!row["median_l2"].is_null()) {
                const double mval = row["median_l2"].get<double>();
                if (mval > 0.0) {
                    xs.push_back(std::log(a));
                    ys.push_back(std::log(mval));
                }
            }
        }
        if (xs.size() >= 2) {
            double mx = 0.0, my = 0.0;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                mx += xs[i];
                my += ys[i];
            }
            mx /= static_cast<double>(xs.size());
            my /= static_cast<double>(xs.size());
            double sxx = 0.0, sxy = 0.0;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                sxx += (xs[i] - mx) * (xs[i] - mx);
                sxy += (xs[i] - mx) * (ys[i] - my);
            }
            if (sxx > 0.0) slope_json = json(sxy / sxx);
        }
    }

    json report;
    report["command"] = "simulate";
    json conf = config_echo(cfg, cfg.lambda, cfg.gamma);
    conf["sim"] = scenario_echo(last_sc, cfg);
    conf["n_ladder"] = json(ladder);
    report["config"] = conf;
    json res;
    res["metrics"] = metrics_summary(last);
    res["ladder"] = rate_rows;
    res["rate_slope"] = slope_json;
    report["result"] = res;
    json diag;
    diag["tuning_lambda"] =
        opts.tuning ? json(opts.tuning->lambda()) : json("default rule");
    diag["tuning_gamma"] = opts.tuning ? json(opts.tuning->gamma()) : json("default rule");
    diag["tolerances"] = tolerance_block(cfg);
    report["diagnostics"] = diag;
    report["version"] = kVersion;

    if (!cfg.output.empty()) {
        std::string reps_csv = "rep,failed,recovered,l2_error,z\n";
        for (const RepRecord& r : last.rep_rows) {
            reps_csv += std::to_string(r.rep);
            reps_csv += r.failed ? ",1," : ",0,";
            reps_csv += r.recovered ? "1," : "0,";
            reps_csv += r.failed ? "" : format_double(r.l2);
            reps_csv += ",";
            if (r.has_z) reps_csv += format_double(r.z);
            reps_csv += "\n";
        }
        write_text(companion_path(cfg.output, "reps"), reps_csv);

        std::string qq_csv = "i,z_sorted,normal_quantile\n";
        std::vector<double> zs = last.z_samples;
        std::sort(zs.begin(), zs.end());
        const boost::math::normal_distribution<double> N01;
        for (std::size_t i = 0; i < zs.size(); ++i) {
            const double p =
                (static_cast<double>(i) + 0.5) / static_cast<double>(zs.size());
            qq_csv += std::to_string(i) + "," + format_double(zs[i]) + "," +
                      format_double(boost::math::quantile(N01, p)) + "\n";
        }
        write_text(companion_path(cfg.output, "qq"), qq_csv);
        write_text(companion_path(cfg.output, "rate"), rate_csv);
    }
    emit_report(cfg, std::move(report));
    return 0;
}

int cmd_check(const RunConfig& cfg) {
    if (cfg.input.empty()) throw contract_error("check requires --input");
    const Dataset ds = read_csv(cfg.input);
    const AssumptionReport ar = assumption_report(ds);

    json report;
    report["command"] = "check";
    report["config"] = config_echo(cfg, cfg.lambda, cfg.gamma);
    json res;
    res["n"] = ds.n();
    res["d"] = ds.d();
    res["eig_min"] = ar.eig_min;
    res["eig_max"] = ar.eig_max;
    res["condition"] =
        ar.eig_min > 0.0 ? json(ar.eig_max / ar.eig_min) : json(nullptr);
    res["max_row_norm"] = ar.max_row_norm;
    res["alpha_n"] = ar.alpha_n;
    res["row_norm_ratio"] = ar.row_norm_ratio;
    res["flagged_singular"] = !(ar.eig_max > 0.0) || ar.eig_min < kSigmaEigRelTol * ar.eig_max;
    report["result"] = res;
    json diag;
    diag["tolerances"] = tolerance_block(cfg);
    report["diagnostics"] = diag;
    report["version"] = kVersion;
    emit_report(cfg, std::move(report));
    return 0;
}

}  // namespace

int run(const RunConfig& cfg) {
    (void)QuantileLevel(cfg.tau);  // validate early for every command
    if (cfg.threads < 0) throw contract_error("threads must be >= 0");
    if (cfg.sim_reps < 1) throw contract_error("sim-reps must be >= 1");
    if (!(cfg.ci_level > 0.0 && cfg.ci_level < 1.0))
        throw contract_error("ci-level must lie in (0,1)");
    if (cfg.command == "fit") return cmd_fit(cfg);
    if (cfg.command == "select") return cmd_select(cfg);
    if (cfg.command == "simulate") return cmd_simulate(cfg);
    if (cfg.command == "check") return cmd_check(cfg);
    throw contract_error("unknown command '" + cfg.command + "'");
}

}  // namespace seloqr
