#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "relest/em.hpp"
#include "relest/estimators.hpp"
#include "relest/io.hpp"
#include "relest/metrics.hpp"
#include "relest/noisegen.hpp"
#include "relest/simnet.hpp"

namespace relest {

inline const std::vector<std::string>& estimator_names() {
    static const std::vector<std::string> names{
        "wls", "ls", "gd_wls", "lae", "lae_subgradient",
        "ls_em", "dist_ls_em", "simnet"};
    return names;
}

namespace detail {

inline void run_parallel(int n_tasks, int threads,
                         const std::function<void(int)>& task) {
    if (threads <= 1) {
        for (int i = 0; i < n_tasks; ++i) task(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&]() {
            for (int i = next.fetch_add(1); i < n_tasks; i = next.fetch_add(1))
                task(i);
        });
    }
    for (auto& th : pool) th.join();
}

inline double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

// FNV-1a over the canonical config dump, recorded in run metadata.
inline std::uint64_t config_hash(const json& j) {
    const std::string s = j.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Example 1

/// The five-node instance used throughout: measurements, truth, and the
/// mixture parameters (alpha, beta) = (0.1, 1).
inline MeasurementSet example1_data() {
    Graph g(5, {Edge{1, 0}, Edge{4, 0}, Edge{2, 1}, Edge{4, 1}, Edge{3, 2},
                Edge{4, 3}});
    Eigen::VectorXd x_true(5);
    x_true << 0.737, 0.088, 0.410, 0.125, -1.362;
    Eigen::VectorXi z_true(6);
    z_true << 0, 0, 0, 0, 1, 1;
    Eigen::VectorXd b(6);
    b << 0.658, 2.105, -0.322, 1.450, -0.094, 1.190;
    return MeasurementSet{std::move(g), std::move(b), std::move(x_true),
                          std::move(z_true), MixtureNoise(0.1, 1.0, 1.0 / 3.0),
                          0};
}

struct Example1Report {
    struct Entry {
        std::string estimator;
        Eigen::VectorXd x_hat;
        double nqe_ratio = 0.0;
        int iterations = 0;
        bool converged = true;
    };
    std::vector<Entry> entries;
    bool wls_vector_ok = false;
    bool ls_vector_ok = false;
    bool wls_nqe_ok = false;
    bool ls_nqe_ok = false;
    bool lae_nqe_ok = false;

    bool all_ok() const {
        return wls_vector_ok && ls_vector_ok && wls_nqe_ok && ls_nqe_ok &&
               lae_nqe_ok;
    }
};

inline Example1Report run_example1() {
    const MeasurementSet ms = example1_data();
    const Eigen::MatrixXd a = incidence_matrix(ms.graph);
    const auto& noise = std::get<MixtureNoise>(ms.noise);
    const Eigen::VectorXd& xt = *ms.x_true;

    Eigen::VectorXd w_true(ms.b.size());
    for (Eigen::Index e = 0; e < ms.b.size(); ++e)
        w_true(e) = (*ms.z_true)(e) ? 1.0 / (noise.beta * noise.beta)
                                    : 1.0 / (noise.alpha * noise.alpha);

    Example1Report rep;
    auto add = [&](const std::string& name, const EstimateResult& r) {
        rep.entries.push_back(Example1Report::Entry{
            name, r.x_hat, nqe(r.x_hat, xt) / 100.0, r.iterations, r.converged});
        return rep.entries.back().x_hat;
    };

    const Eigen::VectorXd x_wls = add("wls", wls(ms.b, a, w_true));
    const Eigen::VectorXd x_ls = add("ls", ls(ms.b, a));
    add("lae", lae(ms.b, a));

    LsEmConfig em_cfg;
    em_cfg.p = 1.0 / 3.0;
    em_cfg.s = 4;
    add("ls_em", ls_em(ms.b, a, em_cfg, &xt));

    DistEmConfig dist_cfg;
    dist_cfg.p = 1.0 / 3.0;
    dist_cfg.alpha = noise.alpha;
    dist_cfg.beta = noise.beta;
    dist_cfg.tol = 1e-9;
    dist_cfg.max_iter = 100000;
    add("dist_ls_em", dist_ls_em(ms.b, a, dist_cfg, &xt));

    Eigen::VectorXd paper_wls(5), paper_ls(5);
    paper_wls << 0.737, 0.078, 0.397, 0.156, -1.368;
    paper_ls << 0.803, 0.084, 0.222, 0.132, -1.242;
    rep.wls_vector_ok = (x_wls - paper_wls).cwiseAbs().maxCoeff() <= 5e-4;
    rep.ls_vector_ok = (x_ls - paper_ls).cwiseAbs().maxCoeff() <= 5e-4;
    rep.wls_nqe_ok = std::abs(rep.entries[0].nqe_ratio - 4.89e-4) <= 0.02 * 4.89e-4;
    rep.ls_nqe_ok = std::abs(rep.entries[1].nqe_ratio - 2.09e-2) <= 0.02 * 2.09e-2;
    rep.lae_nqe_ok = std::abs(rep.entries[2].nqe_ratio - 1.52e-2) <= 0.10 * 1.52e-2;
    return rep;
}

// ---------------------------------------------------------------------------
// Parameter sweeps

struct SweepSpec {
    enum class Param { p_edge, p, beta_ratio };
    Param param = Param::p_edge;
    std::vector<double> grid;
    int n = 50;
    double alpha = 0.05;
    double beta_ratio = 5.0;
    double p = 0.1;
    double p_edge = 0.3;
    int trials = 200;
    std::vector<std::string> estimators{"wls", "ls", "ls_em", "dist_ls_em"};
    std::uint64_t seed = 1;
    int threads = 1;
    bool randomize_init = false;
};

struct SweepCell {
    double grid_value = 0.0;
    std::string estimator;
    std::vector<TrialRecord> records;
    Summary summary;
};

struct SweepReport {
    std::vector<SweepCell> cells;
    json metadata;
};

namespace detail {

struct TrialPoint {
    MeasurementSet ms;
    Eigen::MatrixXd a;
    int er_attempts = 1;
};

inline TrialPoint make_mixture_trial(int n, double p_edge, double alpha,
                                     double beta, double p,
                                     std::uint64_t trial_seed) {
    int attempts = 1;
    Graph g = generate_er_graph(n, p_edge, trial_seed, &attempts);
    Eigen::VectorXd x_true = generate_state(n, trial_seed);
    MeasurementSet ms =
        sample_measurements(g, x_true, MixtureNoise(alpha, beta, p), trial_seed);
    Eigen::MatrixXd a = incidence_matrix(ms.graph);
    return TrialPoint{std::move(ms), std::move(a), attempts};
}

inline TrialRecord record_from(const std::string& name,
                               const EstimateResult& r,
                               const MeasurementSet& ms, std::uint64_t trial,
                               std::uint64_t seed, double runtime) {
    TrialRecord rec;
    rec.trial = trial;
    rec.seed = seed;
    rec.estimator = name;
    rec.nqe_percent = nqe(r.x_hat, *ms.x_true);
    rec.iterations = r.iterations;
    rec.converged = r.converged;
    rec.misclassification_rate =
        r.pi && ms.z_true ? misclassification(*r.pi, *ms.z_true) : -1.0;
    rec.runtime_seconds = runtime;
    return rec;
}

}  // namespace detail

/// Run one estimator on one synthetic instance. Shared by the sweep and
/// robustness commands so every estimator sees the identical data.
inline EstimateResult run_estimator_on(const std::string& name,
                                       const MeasurementSet& ms,
                                       const Eigen::MatrixXd& a, double alpha,
                                       double beta, double p,
                                       const LsEmConfig& em_base) {
    if (name == "wls") {
        Eigen::VectorXd w(ms.b.size());
        for (Eigen::Index e = 0; e < ms.b.size(); ++e)
            w(e) = (*ms.z_true)(e) ? 1.0 / (beta * beta) : 1.0 / (alpha * alpha);
        return wls(ms.b, a, w);
    }
    if (name == "ls") return ls(ms.b, a);
    if (name == "lae") return lae(ms.b, a);
    if (name == "lae_subgradient") {
        LaeConfig cfg;
        cfg.mode = LaeConfig::Mode::subgradient;
        return lae(ms.b, a, cfg);
    }
    if (name == "ls_em") {
        LsEmConfig cfg = em_base;
        cfg.p = p;
        return ls_em(ms.b, a, cfg);
    }
    if (name == "dist_ls_em") {
        DistEmConfig cfg;
        cfg.p = p;
        cfg.alpha = alpha;
        cfg.beta = beta;
        return dist_ls_em(ms.b, a, cfg);
    }
    std::string valid;
    for (const auto& s : estimator_names()) valid += (valid.empty() ? "" : ", ") + s;
    throw std::invalid_argument("unknown estimator '" + name +
                                "'; valid names: " + valid);
}

inline SweepReport run_sweep(const SweepSpec& spec) {
    if (spec.grid.empty()) throw std::invalid_argument("sweep: empty grid");
    if (spec.trials < 1) throw std::invalid_argument("sweep: trials must be >= 1");
    SweepReport report;
    std::uint64_t total_resamples = 0;
    for (double gv : spec.grid) {
        const double p_edge =
            spec.param == SweepSpec::Param::p_edge ? gv : spec.p_edge;
        const double p = spec.param == SweepSpec::Param::p ? gv : spec.p;
        const double ratio =
            spec.param == SweepSpec::Param::beta_ratio ? gv : spec.beta_ratio;
        const double beta = spec.alpha * ratio;

        std::vector<std::vector<TrialRecord>> per_trial(
            static_cast<size_t>(spec.trials));
        std::atomic<std::uint64_t> resamples{0};
        detail::run_parallel(spec.trials, spec.threads, [&](int trial) {
            const std::uint64_t tseed =
                derive_seed(spec.seed, static_cast<std::uint64_t>(trial));
            detail::TrialPoint tp = detail::make_mixture_trial(
                spec.n, p_edge, spec.alpha, beta, p, tseed);
            resamples += static_cast<std::uint64_t>(tp.er_attempts - 1);
            LsEmConfig em_base;
            if (spec.randomize_init) {
                Rng rng = make_rng(tseed, 99);
                std::uniform_int_distribution<int> pick(1, 5);
                em_base.alpha0 = 0.1 * pick(rng);
                em_base.beta0 = 2.0 * em_base.alpha0;
            }
            for (const auto& name : spec.estimators) {
                const double t0 = detail::now_seconds();
                EstimateResult r = run_estimator_on(name, tp.ms, tp.a,
                                                    spec.alpha, beta, p, em_base);
                per_trial[static_cast<size_t>(trial)].push_back(
                    detail::record_from(name, r, tp.ms,
                                        static_cast<std::uint64_t>(trial), tseed,
                                        detail::now_seconds() - t0));
            }
        });
        total_resamples += resamples.load();

        for (size_t ei = 0; ei < spec.estimators.size(); ++ei) {
            SweepCell cell;
            cell.grid_value = gv;
            cell.estimator = spec.estimators[ei];
            std::vector<double> nqes;
            for (int trial = 0; trial < spec.trials; ++trial) {
                cell.records.push_back(per_trial[static_cast<size_t>(trial)][ei]);
                nqes.push_back(cell.records.back().nqe_percent);
            }
            cell.summary = summarize(nqes);
            report.cells.push_back(std::move(cell));
        }
    }
    json meta{{"root_seed", spec.seed},
              {"trials", spec.trials},
              {"er_resamples_total", total_resamples},
              {"n", spec.n},
              {"alpha", spec.alpha}};
    meta["config_hash"] = detail::config_hash(meta);
    report.metadata = std::move(meta);
    return report;
}

inline void write_sweep_csv(const std::string& path, const SweepReport& report) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "grid_value,estimator,trial,nqe,iterations,converged,misclassification\n";
    for (const SweepCell& cell : report.cells) {
        for (const TrialRecord& r : cell.records) {
            out << csv_double(cell.grid_value) << ',' << cell.estimator << ','
                << r.trial << ',' << csv_double(r.nqe_percent) << ','
                << r.iterations << ',' << (r.converged ? 1 : 0) << ','
                << (r.misclassification_rate < 0.0
                        ? ""
                        : csv_double(r.misclassification_rate))
                << "\n";
        }
    }
}

inline json summary_to_json(const Summary& s) {
    return json{{"median", s.median},       {"q25", s.q25},
                {"q75", s.q75},             {"mean", s.mean},
                {"whisker_low", s.whisker_low},
                {"whisker_high", s.whisker_high},
                {"outliers", s.outliers}};
}

inline json sweep_summary_json(const SweepReport& report) {
    json cells = json::array();
    for (const SweepCell& cell : report.cells) {
        json c = summary_to_json(cell.summary);
        c["grid_value"] = cell.grid_value;
        c["estimator"] = cell.estimator;
        cells.push_back(std::move(c));
    }
    return json{{"metadata", report.metadata}, {"cells", std::move(cells)}};
}

// ---------------------------------------------------------------------------
// Robustness study (mis-specified mixture parameters, distributed LS-EM)

struct RobustnessSpec {
    enum class Mode { ratio_known, alpha_known };
    Mode mode = Mode::ratio_known;
    std::vector<double> factors;  // defaults filled by run_robustness
    int n = 50;
    double p_edge = 0.3;
    double alpha = 0.05;
    double beta_ratio = 5.0;
    double p = 0.1;
    int trials = 250;
    std::uint64_t seed = 1;
    int threads = 1;
};

inline SweepReport run_robustness(RobustnessSpec spec) {
    if (spec.factors.empty())
        spec.factors = spec.mode == RobustnessSpec::Mode::ratio_known
                           ? std::vector<double>{0.50, 0.75, 1.00, 1.25, 1.50}
                           : std::vector<double>{2, 4, 6, 8, 10};
    SweepReport report;
    for (double factor : spec.factors) {
        // ratio_known: data uses the true (alpha, beta); the algorithm runs
        // with both scaled by `factor`. alpha_known: data uses beta_ratio =
        // factor while the algorithm keeps the nominal ratio.
        const double data_beta = spec.mode == RobustnessSpec::Mode::ratio_known
                                     ? spec.alpha * spec.beta_ratio
                                     : spec.alpha * factor;
        const double algo_alpha = spec.mode == RobustnessSpec::Mode::ratio_known
                                      ? spec.alpha * factor
                                      : spec.alpha;
        const double algo_beta = spec.mode == RobustnessSpec::Mode::ratio_known
                                     ? spec.alpha * spec.beta_ratio * factor
                                     : spec.alpha * spec.beta_ratio;
        std::vector<TrialRecord> records(static_cast<size_t>(spec.trials));
        detail::run_parallel(spec.trials, spec.threads, [&](int trial) {
            const std::uint64_t tseed =
                derive_seed(spec.seed, static_cast<std::uint64_t>(trial));
            detail::TrialPoint tp = detail::make_mixture_trial(
                spec.n, spec.p_edge, spec.alpha, data_beta, spec.p, tseed);
            DistEmConfig cfg;
            cfg.p = spec.p;
            cfg.alpha = algo_alpha;
            cfg.beta = algo_beta;
            const double t0 = detail::now_seconds();
            EstimateResult r = dist_ls_em(tp.ms.b, tp.a, cfg);
            records[static_cast<size_t>(trial)] =
                detail::record_from("dist_ls_em", r, tp.ms,
                                    static_cast<std::uint64_t>(trial), tseed,
                                    detail::now_seconds() - t0);
        });
        SweepCell cell;
        cell.grid_value = factor;
        cell.estimator = "dist_ls_em";
        cell.records = std::move(records);
        std::vector<double> nqes;
        for (const auto& r : cell.records) nqes.push_back(r.nqe_percent);
        cell.summary = summarize(nqes);
        report.cells.push_back(std::move(cell));
    }
    report.metadata = json{
        {"root_seed", spec.seed},
        {"trials", spec.trials},
        {"mode", spec.mode == RobustnessSpec::Mode::ratio_known ? "ratio_known"
                                                                : "alpha_known"}};
    report.metadata["config_hash"] = detail::config_hash(report.metadata);
    return report;
}

// ---------------------------------------------------------------------------
// Distributed LS-EM vs distributed LAE under model mismatch

struct LaeVsEmSpec {
    std::vector<double> p_edges{0.25, 0.5, 0.75};
    int n = 30;
    double alpha = 0.05;
    double beta_ratio = 5.0;
    double p_algo = 0.2;
    double p_outlier = 0.1;
    double delta = 2.0;
    int trials = 50;
    int horizon = 400;
    double lae_tau0 = 0.01;
    std::uint64_t seed = 1;
    int threads = 1;
};

struct ConvergenceCurves {
    double p_edge = 0.0;
    std::vector<double> em_nqe;   // averaged NQE percent, index = iteration-1
    std::vector<double> lae_nqe;
};

inline std::vector<ConvergenceCurves> run_lae_vs_em(const LaeVsEmSpec& spec) {
    std::vector<ConvergenceCurves> out;
    for (double pe : spec.p_edges) {
        ConvergenceCurves curves;
        curves.p_edge = pe;
        curves.em_nqe.assign(static_cast<size_t>(spec.horizon), 0.0);
        curves.lae_nqe.assign(static_cast<size_t>(spec.horizon), 0.0);
        std::vector<std::vector<double>> em_acc(
            static_cast<size_t>(spec.trials)),
            lae_acc(static_cast<size_t>(spec.trials));
        detail::run_parallel(spec.trials, spec.threads, [&](int trial) {
            const std::uint64_t tseed =
                derive_seed(spec.seed, static_cast<std::uint64_t>(trial));
            Graph g = generate_er_graph(spec.n, pe, tseed);
            // states uniform on [-1, 1]: twice a centered uniform(0,1) draw
            const Eigen::VectorXd x_true = 2.0 * generate_state(spec.n, tseed);
            MeasurementSet ms = sample_mismatch(
                g, x_true, MismatchNoise(spec.alpha, spec.p_outlier, spec.delta),
                tseed);
            const Eigen::MatrixXd a = incidence_matrix(g);

            DistEmConfig cfg;
            cfg.p = spec.p_algo;
            cfg.alpha = spec.alpha;
            cfg.beta = spec.alpha * spec.beta_ratio;
            EstimateResult em =
                dist_ls_em(ms.b, a, cfg, &x_true, spec.horizon);
            std::vector<double>& ec = em_acc[static_cast<size_t>(trial)];
            for (int t = 1; t <= spec.horizon; ++t)
                ec.push_back(em.trace[static_cast<size_t>(t)].nqe);

            LaeConfig lcfg;
            lcfg.mode = LaeConfig::Mode::subgradient;
            lcfg.tau0 = spec.lae_tau0;
            lcfg.subgradient_iters = spec.horizon;
            EstimateResult la = lae(ms.b, a, lcfg, &x_true);
            std::vector<double>& lc = lae_acc[static_cast<size_t>(trial)];
            for (int t = 0; t < spec.horizon; ++t)
                lc.push_back(la.trace[static_cast<size_t>(t)].nqe);
        });
        for (int trial = 0; trial < spec.trials; ++trial) {
            for (int t = 0; t < spec.horizon; ++t) {
                curves.em_nqe[static_cast<size_t>(t)] +=
                    em_acc[static_cast<size_t>(trial)][static_cast<size_t>(t)];
                curves.lae_nqe[static_cast<size_t>(t)] +=
                    lae_acc[static_cast<size_t>(trial)][static_cast<size_t>(t)];
            }
        }
        for (int t = 0; t < spec.horizon; ++t) {
            curves.em_nqe[static_cast<size_t>(t)] /= spec.trials;
            curves.lae_nqe[static_cast<size_t>(t)] /= spec.trials;
        }
        out.push_back(std::move(curves));
    }
    return out;
}

inline void write_curves_csv(const std::string& path,
                             const std::vector<ConvergenceCurves>& curves) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "p_edge,iter,nqe_dist_ls_em,nqe_dist_lae\n";
    for (const auto& c : curves) {
        for (size_t t = 0; t < c.em_nqe.size(); ++t) {
            out << csv_double(c.p_edge) << ',' << (t + 1) << ','
                << csv_double(c.em_nqe[t]) << ',' << csv_double(c.lae_nqe[t])
                << "\n";
        }
    }
}

/// First iteration at which an averaged curve drops to `threshold`
/// (NQE percent); -1 if it never does.
inline int first_iteration_below(const std::vector<double>& curve,
                                 double threshold) {
    for (size_t t = 0; t < curve.size(); ++t)
        if (curve[t] <= threshold) return static_cast<int>(t) + 1;
    return -1;
}

}  // namespace relest
