#include "seloqr/cli.hpp"
#include "seloqr/types.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <iostream>
#include <string>
#include <vector>

namespace {

std::vector<double> parse_double_list(const std::string& s, const std::string& flag) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        std::size_t pos = s.find(',', start);
        if (pos == std::string::npos) pos = s.size();
        const std::string tok = s.substr(start, pos - start);
        double v;
        const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
            throw seloqr::contract_error(flag + ": cannot parse '" + tok + "'");
        out.push_back(v);
        start = pos + 1;
    }
    return out;
}

std::vector<seloqr::Index> parse_index_list(const std::string& s, const std::string& flag) {
    std::vector<seloqr::Index> out;
    for (double v : parse_double_list(s, flag)) {
        const auto i = static_cast<seloqr::Index>(v);
        if (static_cast<double>(i) != v)
            throw seloqr::contract_error(flag + ": entries must be integers");
        out.push_back(i);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    seloqr::RunConfig cfg;
    std::string init_name = "l1_warm";
    std::string sn_policy = "automatic";
    std::string lambda_grid, gamma_grid, sim_beta, n_ladder;

    CLI::App app{"seamless-L0 penalized quantile regression"};
    app.set_config("--config", "", "key=value config file; command-line flags override");
    app.add_option("command", cfg.command, "fit | select | simulate | check")
        ->required()
        ->check(CLI::IsMember({"fit", "select", "simulate", "check"}));
    app.add_option("--input", cfg.input, "input CSV (response column 'y' or first column)");
    app.add_option("--output", cfg.output,
                   "JSON report path; companion CSVs are written next to it");
    app.add_option("--tau", cfg.tau, "quantile level in (0,1)")->capture_default_str();
    app.add_option("--lambda", cfg.lambda, "penalty level; fit default: 0.1 x data scale");
    app.add_option("--gamma", cfg.gamma, "penalty shape; fit default: 10 sqrt(d) n^-1.5");
    app.add_option("--seed", cfg.seed, "RNG seed for simulate")->capture_default_str();
    app.add_option("--threads", cfg.threads, "worker threads, 0 = hardware")
        ->capture_default_str();

    app.add_option("--max-outer", cfg.fit.max_outer)->capture_default_str();
    app.add_option("--max-sweeps", cfg.fit.max_sweeps)->capture_default_str();
    app.add_option("--obj-tol", cfg.fit.obj_tol)->capture_default_str();
    app.add_option("--zero-tol", cfg.fit.zero_tol)->capture_default_str();
    app.add_option("--init", init_name, "zeros | l1_warm")->capture_default_str();

    app.add_option("--sn-policy", sn_policy, "automatic | fixed | formula")
        ->capture_default_str();
    app.add_option("--sn-fixed", cfg.bic.sn_fixed)->capture_default_str();
    app.add_option("--a-exponent", cfg.bic.a_exponent)->capture_default_str();
    app.add_option("--c-cap", cfg.bic.c_cap)->capture_default_str();
    app.add_option("--loss-floor", cfg.bic.loss_floor)->capture_default_str();
    app.add_option("--lambda-grid", lambda_grid, "comma-separated; empty option is an error");
    app.add_option("--gamma-grid", gamma_grid, "comma-separated; empty option is an error");

    app.add_option("--sim-n", cfg.sim_n)->capture_default_str();
    app.add_option("--sim-d", cfg.sim_d, "0 = floor(2 n^0.4)")->capture_default_str();
    app.add_option("--sim-reps", cfg.sim_reps)->capture_default_str();
    app.add_option("--sim-beta", sim_beta, "comma-separated signal, default 2,-2,1.5");
    app.add_option("--sim-error", cfg.sim_error, "normal | student_t | laplace | cauchy")
        ->capture_default_str();
    app.add_option("--sim-error-param", cfg.sim_error_param,
                   "sd / degrees of freedom / scale")
        ->capture_default_str();
    app.add_option("--sim-design", cfg.sim_design, "gaussian_iid | gaussian_correlated")
        ->capture_default_str();
    app.add_option("--sim-rho", cfg.sim_rho)->capture_default_str();
    app.add_option("--n-ladder", n_ladder, "comma-separated n values for a rate study");
    app.add_flag("--with-selection", cfg.with_selection,
                 "run grid selection inside each replication");
    app.add_option("--ci-level", cfg.ci_level)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (init_name == "zeros")
            cfg.fit.init = seloqr::InitPolicy::zeros;
        else if (init_name == "l1_warm")
            cfg.fit.init = seloqr::InitPolicy::l1_warm;
        else
            throw seloqr::contract_error("--init: unknown policy '" + init_name + "'");

        if (sn_policy == "automatic")
            cfg.bic.sn_policy = seloqr::SnPolicy::automatic;
        else if (sn_policy == "fixed")
            cfg.bic.sn_policy = seloqr::SnPolicy::fixed;
        else if (sn_policy == "formula")
            cfg.bic.sn_policy = seloqr::SnPolicy::formula;
        else
            throw seloqr::contract_error("--sn-policy: unknown policy '" + sn_policy + "'");

        if (app.count("--lambda-grid"))
            cfg.bic.lambda_grid = parse_double_list(lambda_grid, "--lambda-grid");
        if (app.count("--gamma-grid"))
            cfg.bic.gamma_grid = parse_double_list(gamma_grid, "--gamma-grid");
        if (app.count("--sim-beta")) cfg.sim_beta = parse_double_list(sim_beta, "--sim-beta");
        if (app.count("--n-ladder")) cfg.n_ladder = parse_index_list(n_ladder, "--n-ladder");

        return seloqr::run(cfg);
    } catch (const seloqr::contract_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const seloqr::data_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const seloqr::numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
