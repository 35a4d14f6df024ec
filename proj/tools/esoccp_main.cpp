// Command-line front end: solve-lcp, solve-slcp, portfolio, spherical.
// Exit codes: 0 success (and verified where applicable), 1 algorithmic
// failure, 2 input error.

#include "esoccp/io.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <iostream>

namespace {

using namespace esoccp;

constexpr int kExitOk = 0;
constexpr int kExitAlgorithm = 1;
constexpr int kExitInput = 2;

RunManifest make_manifest(const std::string& command, const std::vector<std::string>& inputs,
                          std::uint64_t seed, Json config) {
    RunManifest m;
    m.command = command;
    for (const auto& path : inputs) m.input_digests.emplace_back(path, fnv1a_hex(read_file(path)));
    m.seed = seed;
    m.config = std::move(config);
    return m;
}

void emit(const Json& payload, const std::string& out_path) {
    const std::string body = payload.dump(2) + "\n";
    if (out_path.empty()) std::cout << body;
    else write_file(out_path, body);
}

int cmd_solve_lcp(const std::string& problem_path, const std::string& solver_name, double tol,
                  const std::vector<double>& x0, const std::string& trace_out,
                  const std::string& out_path) {
    const auto t0 = std::chrono::steady_clock::now();
    EsoclcpInstance inst = load_esoclcp(problem_path);

    Method method = Method::Lm;
    if (solver_name == "newton") method = Method::Newton;
    else if (solver_name == "lm") method = Method::Lm;
    else if (solver_name == "linesearch") method = Method::LineSearch;
    else throw CLI::ValidationError("--solver", "unknown solver: " + solver_name);

    SolverConfig cfg;
    cfg.tol = tol;
    Vector z0 = Vector::Ones(inst.k + inst.l + 1);
    if (!x0.empty()) {
        if (static_cast<int>(x0.size()) != inst.k + inst.l + 1)
            throw std::invalid_argument("--x0 needs k + l + 1 values");
        for (std::size_t i = 0; i < x0.size(); ++i) z0(static_cast<Eigen::Index>(i)) = x0[i];
    }

    const auto sol = solve_esoclcp(inst, method, z0, cfg);
    if (!trace_out.empty()) write_file(trace_out, trace_to_csv(sol.trace));

    Json out;
    out["status"] = to_string(sol.trace.status);
    out["iterations"] = sol.trace.iterations();
    out["restarts"] = sol.trace.restarts;
    if (sol.x.size()) {
        Json xs = Json::array(), us = Json::array();
        for (Eigen::Index i = 0; i < sol.x.size(); ++i) xs.push_back(sol.x(i));
        for (Eigen::Index i = 0; i < sol.u.size(); ++i) us.push_back(sol.u(i));
        out["x"] = std::move(xs);
        out["u"] = std::move(us);
        out["verification"] = verify_report_to_json(sol.verification);
    }
    if (inst.near_singular) out["warning"] = "near-singular T, A or D block";

    auto manifest = make_manifest("solve-lcp", {problem_path}, 0,
                                  Json{{"solver", solver_name}, {"tol", tol}});
    manifest.wall_clock_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out["manifest"] = manifest_to_json(manifest);
    emit(out, out_path);
    return (sol.trace.status == SolveStatus::Converged && sol.verified) ? kExitOk : kExitAlgorithm;
}

int cmd_solve_slcp(const std::string& model_path, double alpha, const std::vector<int>& sizes,
                   std::optional<std::uint64_t> seed, const std::string& report_path,
                   const std::vector<double>& x0) {
    const auto t0 = std::chrono::steady_clock::now();
    ScenarioModel model = load_scenario_model(model_path);
    if (seed) model.seed = *seed;

    CvarConfig cfg;
    cfg.alpha = alpha;
    if (!sizes.empty()) cfg.sample_sizes = sizes;
    SolverConfig solver_cfg;

    std::optional<Vector> z0;
    if (!x0.empty()) {
        Vector z(static_cast<Eigen::Index>(x0.size()));
        for (std::size_t i = 0; i < x0.size(); ++i) z(static_cast<Eigen::Index>(i)) = x0[i];
        z0 = z;
    }

    const auto report = solve_saa(model, cfg, solver_cfg, z0);
    Json out = saa_report_to_json(report);

    Json sizes_json = Json::array();
    for (int n : cfg.sample_sizes) sizes_json.push_back(n);
    auto manifest = make_manifest("solve-slcp", {model_path}, model.seed,
                                  Json{{"alpha", alpha}, {"sizes", sizes_json}});
    manifest.wall_clock_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out["manifest"] = manifest_to_json(manifest);
    emit(out, report_path);

    const bool ok = !report.stages.empty() &&
                    report.stages.back().status != StageStatus::InnerMax;
    return ok ? kExitOk : kExitAlgorithm;
}

int cmd_portfolio(const std::string& returns_path, const std::string& model_name, double c0,
                  bool identity_cov, const std::string& out_path) {
    const auto t0 = std::chrono::steady_clock::now();
    PortfolioInstance inst = load_portfolio(returns_path, c0);

    Json out;
    out["model"] = model_name;
    Json rj = Json::array();
    for (Eigen::Index i = 0; i < inst.r.size(); ++i) rj.push_back(inst.r(i));
    out["mean_return"] = std::move(rj);

    int exit_code = kExitOk;
    const auto weights_json = [](const Vector& w) {
        Json arr = Json::array();
        for (Eigen::Index i = 0; i < w.size(); ++i) arr.push_back(w(i));
        return arr;
    };

    if (model_name == "mv") {
        Matrix sigma;
        if (identity_cov) {
            sigma = Matrix::Identity(inst.assets(), inst.assets());
        } else {
            // scenario covariance; valid only when the data make it SPD
            sigma = Matrix::Zero(inst.assets(), inst.assets());
            for (int j = 0; j < inst.scenarios(); ++j)
                sigma += inst.f(j) * inst.U.col(j) * inst.U.col(j).transpose();
            sigma += 1e-12 * Matrix::Identity(inst.assets(), inst.assets());
        }
        const Vector w = mv_solve(inst.r, sigma, inst.c0);
        out["w"] = weights_json(w);
    } else if (model_name == "mad") {
        const Vector w0 = Vector::Constant(inst.assets(), 1.0 / inst.assets());
        const auto res = mad_iterate(inst, w0);
        out["w"] = weights_json(res.w);
        out["converged"] = res.converged;
        out["iterations"] = res.iterations;
        if (!res.converged) exit_code = kExitAlgorithm;
    } else if (model_name == "men") {
        const auto feas = men_feasibility(inst);
        out["feasibility"] = Json{{"iv_ok", feas.iv_ok},
                                  {"iv_value", feas.iv_value},
                                  {"iii_ok", feas.iii_ok},
                                  {"iii_value", feas.iii_value}};
        try {
            const auto sol = men_solve(inst);
            out["w"] = weights_json(sol.w);
            out["y"] = weights_json(sol.y);
            out["kkt_residual"] = sol.kkt_residual;
        } catch (const MenInfeasible& e) {
            out["error"] = "infeasible";
            out["iv_value"] = e.iv_value;
            exit_code = kExitAlgorithm;
        }
    } else {
        throw CLI::ValidationError("--model", "unknown model: " + model_name);
    }

    auto manifest = make_manifest("portfolio", {returns_path}, 0,
                                  Json{{"model", model_name}, {"c0", c0}});
    manifest.wall_clock_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out["manifest"] = manifest_to_json(manifest);
    emit(out, out_path);
    return exit_code;
}

int cmd_experiment(const std::vector<int>& ns, const std::vector<int>& Ts,
                   const std::vector<double>& c0s, int trials, std::uint64_t seed,
                   const std::string& out_path) {
    const auto rows = probability_experiment(ns, Ts, c0s, trials, seed);
    std::ostringstream csv;
    csv << "n,T,c0,trials,rate_iv,rate_iii\n";
    csv.precision(10);
    for (const auto& row : rows)
        csv << row.n << ',' << row.T << ',' << row.c0 << ',' << row.trials << ',' << row.rate_iv
            << ',' << row.rate_iii << '\n';
    if (out_path.empty()) std::cout << csv.str();
    else write_file(out_path, csv.str());
    return kExitOk;
}

int cmd_spherical(const std::string& matrix_path, const std::string& cone_name,
                  const std::string& out_path) {
    const auto t0 = std::chrono::steady_clock::now();
    const Matrix A = load_matrix(matrix_path);
    const int n = static_cast<int>(A.rows());
    const ConeSpec cone =
        cone_name == "lorentz" ? ConeSpec::lorentz(n) : ConeSpec::orthant(n);
    const auto verdict = qc_analyze(A, cone);

    Json out = verdict_to_json(verdict);
    auto manifest = make_manifest("spherical", {matrix_path}, 0, Json{{"cone", cone_name}});
    manifest.wall_clock_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out["manifest"] = manifest_to_json(manifest);
    emit(out, out_path);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conic complementarity toolkit: extended second order cone LCPs, "
                 "CVaR-based stochastic solves, portfolio models and spherical "
                 "quasi-convexity analysis"};
    app.require_subcommand(1);

    // solve-lcp
    std::string problem_path, solver_name = "lm", trace_out, lcp_out;
    double lcp_tol = 1e-7;
    std::vector<double> x0;
    auto* lcp = app.add_subcommand("solve-lcp", "Solve a deterministic ESOCLCP problem file");
    lcp->add_option("problem", problem_path, "problem JSON file")->required();
    lcp->add_option("--solver", solver_name, "newton|lm|linesearch")->capture_default_str();
    lcp->add_option("--tol", lcp_tol, "stopping tolerance")->capture_default_str();
    lcp->add_option("--x0", x0, "initial point (k+l+1 values)");
    lcp->add_option("--trace-out", trace_out, "write the iteration trace CSV here");
    lcp->add_option("--out", lcp_out, "write the solution JSON here (default stdout)");

    // solve-slcp
    std::string model_path, report_path;
    double alpha = 0.05;
    std::vector<int> sizes;
    std::optional<std::uint64_t> seed;
    std::vector<double> slcp_x0;
    auto* slcp = app.add_subcommand("solve-slcp", "Solve a stochastic model via smoothing SAA");
    slcp->add_option("model", model_path, "scenario model JSON file")->required();
    slcp->add_option("--alpha", alpha, "CVaR tail level")->capture_default_str();
    slcp->add_option("--sizes", sizes, "stage sample sizes (increasing)");
    slcp->add_option("--seed", seed, "override the model seed");
    slcp->add_option("--x0", slcp_x0, "initial point (k+l+1 values)");
    slcp->add_option("--report", report_path, "write the staged report JSON here");

    // portfolio
    std::string returns_path, pf_model = "men", pf_out;
    double c0 = 1.0;
    bool identity_cov = false;
    auto* pf = app.add_subcommand("portfolio", "Portfolio weights from scenario returns");
    pf->add_option("returns", returns_path, "returns CSV or JSON file")->required();
    pf->add_option("--model", pf_model, "mv|mad|men")->capture_default_str();
    pf->add_option("--c0", c0, "risk aversion")->capture_default_str();
    pf->add_flag("--identity-cov", identity_cov, "mv: use the identity covariance");
    pf->add_option("--out", pf_out, "write the weights JSON here (default stdout)");

    // experiment
    std::vector<int> exp_n{3}, exp_T{5, 20, 100, 500};
    std::vector<double> exp_c0{2.0};
    int exp_trials = 2000;
    std::uint64_t exp_seed = 0;
    std::string exp_out;
    auto* ex = app.add_subcommand("experiment",
                                  "Feasibility hold-rate table over random instances (CSV)");
    ex->add_option("--n", exp_n, "asset counts")->capture_default_str();
    ex->add_option("--T", exp_T, "scenario counts")->capture_default_str();
    ex->add_option("--c0", exp_c0, "risk aversions")->capture_default_str();
    ex->add_option("--trials", exp_trials, "trials per cell")->capture_default_str();
    ex->add_option("--seed", exp_seed, "random seed")->capture_default_str();
    ex->add_option("--out", exp_out, "write the CSV here (default stdout)");

    // spherical
    std::string matrix_path, cone_name = "orthant", sph_out;
    auto* sph = app.add_subcommand("spherical", "Spherical quasi-convexity verdict for a matrix");
    sph->add_option("matrix", matrix_path, "matrix file (JSON or whitespace text)")->required();
    sph->add_option("--cone", cone_name, "orthant|lorentz")->capture_default_str();
    sph->add_option("--out", sph_out, "write the verdict JSON here (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (lcp->parsed()) return cmd_solve_lcp(problem_path, solver_name, lcp_tol, x0, trace_out, lcp_out);
        if (slcp->parsed()) return cmd_solve_slcp(model_path, alpha, sizes, seed, report_path, slcp_x0);
        if (pf->parsed()) return cmd_portfolio(returns_path, pf_model, c0, identity_cov, pf_out);
        if (ex->parsed()) return cmd_experiment(exp_n, exp_T, exp_c0, exp_trials, exp_seed, exp_out);
        if (sph->parsed()) return cmd_spherical(matrix_path, cone_name, sph_out);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const esoccp::Json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAlgorithm;
    }
    return kExitInput;
}
