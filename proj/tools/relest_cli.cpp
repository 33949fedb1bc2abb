// Command-line harness for the relative-estimation library: reproduces the
// five-node reference instance, runs single estimations from a JSON config,
// and drives the Monte-Carlo sweep / robustness / convergence-comparison
// experiments, emitting plot-ready CSV and JSON.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "relest/relest.hpp"

namespace fs = std::filesystem;
using relest::json;

namespace {

struct CommonArgs {
    std::string config;
    std::string out = ".";
    std::uint64_t seed = 1;
    int trials = -1;
    int threads = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_config) {
    auto* opt = cmd->add_option("--config", args.config, "JSON config file");
    if (needs_config) opt->required();
    cmd->add_option("--out", args.out, "output directory");
    cmd->add_option("--seed", args.seed, "root seed");
    cmd->add_option("--trials", args.trials, "trials per grid point");
    cmd->add_option("--threads", args.threads, "worker threads");
}

void ensure_out(const std::string& out) {
    if (!out.empty() && out != ".") fs::create_directories(out);
}

std::string out_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

int cmd_example1(const CommonArgs& args) {
    relest::Example1Report rep = relest::run_example1();
    std::cout << "five-node reference instance (alpha=0.1, beta=1)\n";
    for (const auto& e : rep.entries) {
        std::cout << "  " << e.estimator << ": x_hat = [";
        for (Eigen::Index i = 0; i < e.x_hat.size(); ++i)
            std::cout << (i ? ", " : "") << e.x_hat(i);
        std::cout << "]  nqe_ratio = " << e.nqe_ratio
                  << "  iterations = " << e.iterations
                  << (e.converged ? "" : "  (not converged)") << "\n";
    }
    auto flag = [](bool ok) { return ok ? "pass" : "FAIL"; };
    std::cout << "  wls vector within 5e-4: " << flag(rep.wls_vector_ok) << "\n"
              << "  ls vector within 5e-4: " << flag(rep.ls_vector_ok) << "\n"
              << "  wls nqe 4.89e-4 +-2%: " << flag(rep.wls_nqe_ok) << "\n"
              << "  ls nqe 2.09e-2 +-2%: " << flag(rep.ls_nqe_ok) << "\n"
              << "  lae nqe 1.52e-2 +-10%: " << flag(rep.lae_nqe_ok) << "\n";
    return rep.all_ok() ? 0 : 1;
}

relest::json result_to_json(const relest::EstimateResult& r) {
    json j;
    j["x_hat"] = relest::vector_to_json(r.x_hat);
    if (r.pi) j["pi"] = relest::vector_to_json(*r.pi);
    if (r.alpha_hat) j["alpha_hat"] = *r.alpha_hat;
    if (r.beta_hat) j["beta_hat"] = *r.beta_hat;
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    j["fixed_point"] = {{"x_resolve", r.fixed_point.x_resolve},
                        {"x_gradient", r.fixed_point.x_gradient},
                        {"weights_update", r.fixed_point.weights_update},
                        {"pi_update", r.fixed_point.pi_update},
                        {"alpha_update", r.fixed_point.alpha_update},
                        {"beta_update", r.fixed_point.beta_update},
                        {"pi_strict", r.fixed_point.pi_strict},
                        {"alpha_strict", r.fixed_point.alpha_strict},
                        {"beta_strict", r.fixed_point.beta_strict}};
    if (!r.diagnostics.empty()) j["diagnostics"] = r.diagnostics;
    return j;
}

// Builds the instance named by the config: either a measurement file or a
// generated (graph, state, noise) triple.
relest::MeasurementSet config_instance(const json& cfg, std::uint64_t seed) {
    if (cfg.contains("measurements") && cfg["measurements"].contains("file"))
        return relest::measurement_set_from_json(
            relest::load_json_file(cfg["measurements"]["file"].get<std::string>()));
    if (!cfg.contains("graph"))
        throw std::invalid_argument(
            "config.graph: required unless measurements.file is given");
    const json& gj = cfg["graph"];
    std::optional<relest::Graph> g;
    if (gj.contains("file"))
        g = relest::graph_from_json(
            relest::load_json_file(gj["file"].get<std::string>()));
    else if (gj.contains("er"))
        g = relest::generate_er_graph(gj["er"].at("n").get<int>(),
                                      gj["er"].at("p_edge").get<double>(), seed);
    else
        throw std::invalid_argument("config.graph: need 'file' or 'er'");
    if (!cfg.contains("measurements") || !cfg["measurements"].contains("noise"))
        throw std::invalid_argument("config.measurements: need 'file' or 'noise'");
    const json& nj = cfg["measurements"]["noise"];
    const std::string model = nj.at("model").get<std::string>();
    const Eigen::VectorXd x_true = relest::generate_state(g->n_nodes(), seed);
    if (model == "mixture")
        return relest::sample_measurements(
            *g, x_true,
            relest::MixtureNoise(nj.at("alpha").get<double>(),
                                 nj.at("beta").get<double>(),
                                 nj.at("p").get<double>()),
            seed);
    if (model == "mismatch")
        return relest::sample_mismatch(
            *g, x_true,
            relest::MismatchNoise(nj.at("alpha").get<double>(),
                                  nj.at("p").get<double>(), nj.value("delta", 2.0)),
            seed);
    throw std::invalid_argument("config.measurements.noise.model: unknown model '" +
                                model + "'");
}

int cmd_run(const CommonArgs& args) {
    const json cfg = relest::load_json_file(args.config);
    if (!cfg.contains("estimator"))
        throw std::invalid_argument("config.estimator: missing");
    const std::string name = cfg["estimator"].get<std::string>();
    const auto& valid = relest::estimator_names();
    if (std::find(valid.begin(), valid.end(), name) == valid.end()) {
        std::string list;
        for (const auto& s : valid) list += (list.empty() ? "" : ", ") + s;
        throw std::invalid_argument("config.estimator: unknown estimator '" +
                                    name + "'; valid names: " + list);
    }
    const std::uint64_t seed = cfg.value("seed", args.seed);
    ensure_out(args.out);
    relest::MeasurementSet ms = config_instance(cfg, seed);
    const Eigen::MatrixXd a = relest::incidence_matrix(ms.graph);
    const json params = cfg.value("params", json::object());

    relest::EstimateResult result;
    if (name == "wls" || name == "gd_wls") {
        Eigen::VectorXd w;
        if (params.contains("weights") && params["weights"].is_array()) {
            w = relest::vector_from_json(params["weights"]);
        } else if (ms.z_true && std::holds_alternative<relest::MixtureNoise>(ms.noise)) {
            const auto& noise = std::get<relest::MixtureNoise>(ms.noise);
            w.resize(ms.b.size());
            for (Eigen::Index e = 0; e < ms.b.size(); ++e)
                w(e) = (*ms.z_true)(e) ? 1.0 / (noise.beta * noise.beta)
                                       : 1.0 / (noise.alpha * noise.alpha);
        } else {
            throw std::invalid_argument(
                "config.params.weights: required when the instance carries no "
                "mixture ground truth");
        }
        if (name == "wls") {
            result = relest::wls(ms.b, a, w);
        } else {
            const double l_norm =
                relest::spectral_norm(relest::weighted_laplacian(a, w));
            const double tau = params.value("tau", 1.0 / l_norm);
            result = relest::gd_wls(ms.b, a, w, tau, params.value("tol", 1e-10),
                                    params.value("max_iter", 100000));
        }
    } else if (name == "ls") {
        result = relest::ls(ms.b, a);
    } else if (name == "lae" || name == "lae_subgradient") {
        relest::LaeConfig lcfg;
        if (name == "lae_subgradient")
            lcfg.mode = relest::LaeConfig::Mode::subgradient;
        lcfg.delta = params.value("delta", lcfg.delta);
        lcfg.refine = params.value("refine", lcfg.refine);
        lcfg.tau0 = params.value("tau0", lcfg.tau0);
        lcfg.subgradient_iters =
            params.value("iters", lcfg.subgradient_iters);
        result = relest::lae(ms.b, a, lcfg,
                             ms.x_true ? &*ms.x_true : nullptr);
    } else if (name == "ls_em") {
        relest::LsEmConfig ecfg;
        ecfg.p = params.value("p", ecfg.p);
        ecfg.s = params.value("s", ecfg.s);
        ecfg.c1 = params.value("c1", ecfg.c1);
        ecfg.c2 = params.value("c2", ecfg.c2);
        ecfg.alpha0 = params.value("alpha0", ecfg.alpha0);
        ecfg.beta0 = params.value("beta0", ecfg.beta0);
        ecfg.tol = params.value("tol", ecfg.tol);
        ecfg.max_iter = params.value("max_iter", ecfg.max_iter);
        result = relest::ls_em(ms.b, a, ecfg, ms.x_true ? &*ms.x_true : nullptr);
    } else if (name == "dist_ls_em" || name == "simnet") {
        relest::DistEmConfig dcfg;
        dcfg.p = params.value("p", dcfg.p);
        dcfg.alpha = params.value("alpha", dcfg.alpha);
        dcfg.beta = params.value("beta", dcfg.beta);
        dcfg.tau = params.value("tau", dcfg.tau);
        dcfg.tol = params.value("tol", dcfg.tol);
        dcfg.max_iter = params.value("max_iter", dcfg.max_iter);
        if (dcfg.tau >= 0.0 &&
            dcfg.tau >= relest::dist_em_tau_bound(a, dcfg.alpha))
            throw std::invalid_argument(
                "config.params.tau: violates the convergence bound "
                "tau < alpha^2/||A||^2 = " +
                std::to_string(relest::dist_em_tau_bound(a, dcfg.alpha)));
        if (name == "dist_ls_em") {
            result = relest::dist_ls_em(ms.b, a, dcfg,
                                        ms.x_true ? &*ms.x_true : nullptr);
        } else {
            relest::SimRun run = relest::run_rounds(
                ms.graph, ms.b, dcfg, params.value("rounds", -1),
                params.value("log_messages", true),
                ms.x_true ? &*ms.x_true : nullptr);
            if (run.logged)
                relest::write_message_log(out_path(args.out, "messages.jsonl"),
                                          run.messages);
            result = std::move(run.result);
        }
    }

    json out = result_to_json(result);
    out["estimator"] = name;
    out["seed"] = seed;
    if (ms.x_true) out["nqe_percent"] = relest::nqe(result.x_hat, *ms.x_true);
    json cfg_copy = cfg;
    out["config_hash"] = relest::detail::config_hash(cfg_copy);
    relest::save_json_file(out_path(args.out, "result.json"), out);
    relest::write_trace_csv(out_path(args.out, "trace.csv"), result.trace);
    std::cout << "wrote " << out_path(args.out, "result.json") << " and trace.csv\n";
    return 0;
}

relest::SweepSpec sweep_spec_from_config(const json& cfg, const CommonArgs& args) {
    relest::SweepSpec spec;
    const std::string param = cfg.at("param").get<std::string>();
    if (param == "p_edge")
        spec.param = relest::SweepSpec::Param::p_edge;
    else if (param == "p")
        spec.param = relest::SweepSpec::Param::p;
    else if (param == "beta_ratio")
        spec.param = relest::SweepSpec::Param::beta_ratio;
    else
        throw std::invalid_argument(
            "config.param: must be p_edge, p, or beta_ratio");
    spec.grid = cfg.at("grid").get<std::vector<double>>();
    spec.n = cfg.value("n", spec.n);
    spec.alpha = cfg.value("alpha", spec.alpha);
    spec.beta_ratio = cfg.value("beta_ratio", spec.beta_ratio);
    spec.p = cfg.value("p", spec.p);
    spec.p_edge = cfg.value("p_edge", spec.p_edge);
    spec.trials = cfg.value("trials", spec.trials);
    if (cfg.contains("estimators"))
        spec.estimators = cfg["estimators"].get<std::vector<std::string>>();
    spec.randomize_init = cfg.value("randomize_init", false);
    spec.seed = cfg.value("seed", args.seed);
    if (args.trials > 0) spec.trials = args.trials;
    spec.threads = args.threads;
    return spec;
}

int cmd_sweep(const CommonArgs& args) {
    const json cfg = relest::load_json_file(args.config);
    relest::SweepSpec spec = sweep_spec_from_config(cfg, args);
    relest::SweepReport report = relest::run_sweep(spec);
    ensure_out(args.out);
    relest::write_sweep_csv(out_path(args.out, "sweep.csv"), report);
    relest::save_json_file(out_path(args.out, "sweep_summary.json"),
                           relest::sweep_summary_json(report));
    std::cout << "wrote sweep.csv and sweep_summary.json under " << args.out
              << "\n";
    return 0;
}

int cmd_robustness(const CommonArgs& args, const std::string& mode) {
    relest::RobustnessSpec spec;
    if (mode == "ratio_known")
        spec.mode = relest::RobustnessSpec::Mode::ratio_known;
    else if (mode == "alpha_known")
        spec.mode = relest::RobustnessSpec::Mode::alpha_known;
    else
        throw std::invalid_argument(
            "--mode must be ratio_known or alpha_known");
    if (!args.config.empty()) {
        const json cfg = relest::load_json_file(args.config);
        spec.factors = cfg.value("factors", spec.factors);
        spec.trials = cfg.value("trials", spec.trials);
        spec.seed = cfg.value("seed", args.seed);
    } else {
        spec.seed = args.seed;
    }
    if (args.trials > 0) spec.trials = args.trials;
    spec.threads = args.threads;
    relest::SweepReport report = relest::run_robustness(spec);
    ensure_out(args.out);
    relest::write_sweep_csv(out_path(args.out, "robustness.csv"), report);
    relest::save_json_file(out_path(args.out, "robustness_summary.json"),
                           relest::sweep_summary_json(report));
    std::cout << "wrote robustness.csv and robustness_summary.json under "
              << args.out << "\n";
    return 0;
}

int cmd_lae_vs_em(const CommonArgs& args, std::vector<double> p_edges) {
    relest::LaeVsEmSpec spec;
    if (!p_edges.empty()) spec.p_edges = std::move(p_edges);
    if (!args.config.empty()) {
        const json cfg = relest::load_json_file(args.config);
        spec.trials = cfg.value("trials", spec.trials);
        spec.horizon = cfg.value("horizon", spec.horizon);
        spec.lae_tau0 = cfg.value("lae_tau0", spec.lae_tau0);
        spec.seed = cfg.value("seed", args.seed);
    } else {
        spec.seed = args.seed;
    }
    if (args.trials > 0) spec.trials = args.trials;
    spec.threads = args.threads;
    const auto curves = relest::run_lae_vs_em(spec);
    ensure_out(args.out);
    relest::write_curves_csv(out_path(args.out, "lae_vs_em.csv"), curves);
    for (const auto& c : curves) {
        std::cout << "p_edge=" << c.p_edge << ": dist_ls_em reaches 0.1% at iter "
                  << relest::first_iteration_below(c.em_nqe, 0.1)
                  << ", dist_lae at iter "
                  << relest::first_iteration_below(c.lae_nqe, 0.1)
                  << " (-1 = never)\n";
    }
    std::cout << "wrote lae_vs_em.csv under " << args.out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"estimation from relative measurements under Gaussian-mixture noise"};
    app.require_subcommand(1);

    CommonArgs example1_args, run_args, sweep_args, robust_args, lae_args;
    std::string robust_mode = "ratio_known";
    std::vector<double> lae_p_edges;

    CLI::App* c_example1 = app.add_subcommand("example1", "reproduce the five-node reference instance");
    add_common(c_example1, example1_args, false);
    CLI::App* c_run = app.add_subcommand("run", "single estimation run from a JSON config");
    add_common(c_run, run_args, true);
    CLI::App* c_sweep = app.add_subcommand("sweep", "Monte-Carlo parameter sweep");
    add_common(c_sweep, sweep_args, true);
    CLI::App* c_robust = app.add_subcommand("robustness", "mis-specified-parameter study");
    add_common(c_robust, robust_args, false);
    c_robust->add_option("--mode", robust_mode, "ratio_known | alpha_known");
    CLI::App* c_lae = app.add_subcommand("lae-vs-em", "convergence-speed comparison under model mismatch");
    add_common(c_lae, lae_args, false);
    c_lae->add_option("--p-edges", lae_p_edges, "edge probabilities");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_example1->parsed()) return cmd_example1(example1_args);
        if (c_run->parsed()) return cmd_run(run_args);
        if (c_sweep->parsed()) return cmd_sweep(sweep_args);
        if (c_robust->parsed()) return cmd_robustness(robust_args, robust_mode);
        if (c_lae->parsed()) return cmd_lae_vs_em(lae_args, lae_p_edges);
    } catch (const std::invalid_argument& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    }
    return 0;
}
