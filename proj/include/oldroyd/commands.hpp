#pragma once

// Command layer under the CLI: each cmd_* runs one experiment end to
// end (fields -> series -> verdicts -> artifacts on disk) and returns a
// process exit code:
//
//   0  every hard check passed (soft ones may or may not have)
//   2  hard checks passed, at least one soft (statistical) check failed
//   1  a hard check failed, or the run errored
//
// Artifacts: norm series as CSV (header `t,<labels>`), verdicts as a
// JSON object with a `checks` array ({check, window, slope|residual|
// ratio, pass, soft, details}), states as binary checkpoints. All
// outputs are deterministic for a fixed config and seed.

#include <array>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "oldroyd/checkpoint.hpp"
#include "oldroyd/config.hpp"
#include "oldroyd/decay_quadrature.hpp"
#include "oldroyd/dynamics.hpp"
#include "oldroyd/monitors.hpp"

namespace oldroyd {

struct Verdict {
    std::string check;
    std::optional<std::array<double, 2>> window;
    std::string value_key = "residual";   // "slope", "residual", or "ratio"
    double value = 0.0;
    bool pass = true;
    bool soft = false;
    std::string details;
};

namespace detail {

inline nlohmann::ordered_json verdict_json(const Verdict& v) {
    nlohmann::ordered_json j;
    j["check"] = v.check;
    if (v.window) j["window"] = {(*v.window)[0], (*v.window)[1]};
    j[v.value_key] = v.value;
    j["pass"] = v.pass;
    j["soft"] = v.soft;
    j["details"] = v.details;
    return j;
}

inline int exit_code(const std::vector<Verdict>& checks) {
    bool soft_fail = false;
    for (const Verdict& v : checks) {
        if (v.pass) continue;
        if (!v.soft) return 1;
        soft_fail = true;
    }
    return soft_fail ? 2 : 0;
}

inline void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

inline void write_verdicts(const std::filesystem::path& path, const std::string& command,
                           const std::vector<Verdict>& checks,
                           const nlohmann::ordered_json& extra = {}) {
    nlohmann::ordered_json j;
    j["command"] = command;
    if (!extra.empty()) j["run"] = extra;
    j["checks"] = nlohmann::ordered_json::array();
    for (const Verdict& v : checks) j["checks"].push_back(verdict_json(v));
    bool all_hard = true, all_soft = true;
    for (const Verdict& v : checks) {
        if (!v.pass && !v.soft) all_hard = false;
        if (!v.pass && v.soft) all_soft = false;
    }
    j["hard_pass"] = all_hard;
    j["soft_pass"] = all_soft;
    write_text(path, j.dump(2) + "\n");
}

} // namespace detail

// ----------------------------------------------------------------- simulate

inline int cmd_simulate(const RunConfig& cfg, const std::filesystem::path& out_dir,
                        std::ostream& log) {
    std::filesystem::create_directories(out_dir);
    Grid g(cfg.d, cfg.N, cfg.L);
    auto [u0, tau0] = make_initial_data(cfg.initial_spec(), g);
    SimulationState state(g, cfg.model);
    state.u = std::move(u0);
    state.tau = std::move(tau0);

    double next_checkpoint = cfg.checkpoint_every > 0.0 ? cfg.checkpoint_every : -1.0;
    std::filesystem::path cp_path = out_dir / cfg.out_checkpoint;
    auto on_sample = [&](const SimulationState& s) {
        if (next_checkpoint >= 0.0 && s.t >= next_checkpoint - 1e-12) {
            save_checkpoint(cp_path.string(), s);
            next_checkpoint += cfg.checkpoint_every;
        }
    };

    SimulationResult res = simulate(std::move(state), cfg.dt, cfg.T, cfg.recorder_spec(),
                                    cfg.linear_only, on_sample);
    detail::write_text(out_dir / cfg.out_norms, res.series.to_csv());
    save_checkpoint(cp_path.string(), res.state);

    std::vector<Verdict> checks;
    const NormSeries& sr = res.series;
    const std::array<double, 2> span{sr.times.empty() ? 0.0 : sr.times.front(),
                                     sr.times.empty() ? 0.0 : sr.times.back()};

    {
        Verdict v;
        v.check = "completed";
        v.window = span;
        v.value_key = "residual";
        v.value = res.completed ? 0.0 : 1.0;
        v.pass = res.completed;
        v.details = res.completed ? "run reached T" : res.failure;
        checks.push_back(v);
    }

    if (sr.times.size() >= 2) {
        for (double k : cfg.k_list) {
            std::string suffix = detail::order_suffix(k);
            LyapunovReport rep = lyapunov_check(sr.times, sr.col("E_H" + suffix),
                                                sr.col("D_H" + suffix));
            Verdict v;
            v.check = "lyapunov_H" + suffix;
            v.window = span;
            v.value = std::max(rep.worst_interval,
                               std::max(rep.worst_dissipative, rep.worst_integrated));
            v.pass = rep.pass();
            v.details = "worst interval " + NormSeries::format_double(rep.worst_interval)
                      + ", dissipative " + NormSeries::format_double(rep.worst_dissipative)
                      + ", integrated " + NormSeries::format_double(rep.worst_integrated);
            checks.push_back(v);
        }

        if (cfg.sigma > 0.0 && cfg.epsilon > 0.0) {
            std::string suffix = detail::order_suffix(cfg.sigma);
            BoundednessReport rep = negative_sobolev_verdict(sr.col("E_Hm" + suffix));
            Verdict v;
            v.check = "negative_sobolev_bounded";
            v.window = span;
            v.value = rep.initial > 0.0 ? rep.peak / rep.initial : 0.0;
            v.value_key = "ratio";
            v.pass = rep.bounded;
            v.details = "peak/initial against threshold 2";
            checks.push_back(v);
        }

        {
            double worst = 0.0;
            for (double k : cfg.k_list)
                for (double r : sr.col("cancel_H" + detail::order_suffix(k)))
                    worst = std::max(worst, r);
            Verdict v;
            v.check = "cancellation";
            v.window = span;
            v.value = worst;
            v.pass = worst <= 1e-10;
            v.details = "max over rows and orders, tolerance 1e-10";
            checks.push_back(v);
        }

        {
            double worst = -std::numeric_limits<double>::infinity();
            for (double e : sr.col("interp_excess")) worst = std::max(worst, e);
            Verdict v;
            v.check = "interpolation";
            v.window = span;
            v.value = worst;
            v.pass = worst <= 1e-12;
            v.details = "max excess over rows, tolerance 1e-12";
            checks.push_back(v);
        }

        {
            double div = 0.0, herm = 0.0;
            for (double x : sr.col("div_drift")) div = std::max(div, x);
            for (double x : sr.col("herm_drift")) herm = std::max(herm, x);
            Verdict v;
            v.check = "invariant_drift";
            v.window = span;
            v.value = std::max(div, herm);
            v.pass = v.value <= 1e-10;
            v.details = "max per-step divergence/Hermitian drift, tolerance 1e-10";
            checks.push_back(v);
        }

        {
            std::vector<double> E = besov_functional_E(sr.times, sr.col("u_Bcrit"),
                                                       sr.col("tau_Bcrit"), sr.col("u_Bhigh"),
                                                       cfg.model.a, cfg.besov_weight);
            Verdict v;
            v.check = "besov_functional";
            v.window = span;
            v.value_key = "ratio";
            v.value = E.front() > 0.0 ? E.back() / E.front() : 0.0;
            v.pass = v.value <= 5.0;
            v.details = "E(T)/E(0) against threshold 5";
            checks.push_back(v);
        }
    }

    nlohmann::ordered_json run;
    run["d"] = cfg.d;
    run["N"] = cfg.N;
    run["epsilon"] = cfg.epsilon;
    run["seed"] = cfg.seed;
    run["linear_only"] = cfg.linear_only;
    detail::write_verdicts(out_dir / cfg.out_verdicts, "simulate", checks, run);

    int code = detail::exit_code(checks);
    log << "simulate: " << sr.times.size() << " rows, exit " << code << "\n";
    return code;
}

// -------------------------------------------------------------- linear decay

inline int cmd_linear_decay(const RunConfig& cfg, const std::filesystem::path& out_dir,
                            std::ostream& log) {
    std::filesystem::create_directories(out_dir);

    std::vector<std::pair<DecayComponent, double>> plan;
    for (double k : cfg.decay_k_list) plan.emplace_back(DecayComponent::u, k);
    for (double k : cfg.decay_k_list) plan.emplace_back(DecayComponent::tau, k);

    NormSeries series;
    for (auto [comp, k] : plan)
        series.labels.push_back(std::string(comp == DecayComponent::u ? "u_k" : "tau_k")
                                + detail::order_suffix(k));

    std::vector<double> times = geometric_times(cfg.decay_t_min, cfg.decay_t_max,
                                                cfg.decay_per_decade);
    times.insert(times.begin(), 0.0);

    std::vector<Verdict> checks;
    std::vector<bool> converged(plan.size(), true);
    for (double t : times) {
        std::vector<double> row;
        for (std::size_t i = 0; i < plan.size(); ++i) {
            DecayProfile prof;
            prof.sigma = cfg.decay_sigma;
            prof.epsilon0 = cfg.decay_epsilon0;
            prof.k = plan[i].second;
            prof.component = plan[i].first;
            prof.cutoff = cfg.decay_cutoff;
            prof.tol = cfg.decay_tol;
            QuadratureResult q = decay_norm_quadrature(cfg.d, prof, t, cfg.model);
            if (!q.converged) converged[i] = false;
            row.push_back(q.value);
        }
        series.append(t, std::move(row));
    }
    detail::write_text(out_dir / cfg.out_decay_norms, series.to_csv());

    std::vector<double> slopes(plan.size());
    for (std::size_t i = 0; i < plan.size(); ++i) {
        {
            Verdict v;
            v.check = "quadrature_" + series.labels[i];
            v.value = converged[i] ? 0.0 : 1.0;
            v.pass = converged[i];
            v.details = converged[i] ? "all nodes converged" : "error estimate above tolerance";
            checks.push_back(v);
        }
        FitResult fit = fit_decay(series.times, series.col(series.labels[i]),
                                  cfg.decay_fit_t0, cfg.decay_fit_t1);
        slopes[i] = fit.slope;
        double k = plan[i].second;
        double predicted = plan[i].first == DecayComponent::u
                               ? -0.5 * (k + cfg.decay_sigma + cfg.decay_epsilon0)
                               : -0.5 * (k + 1.0 + cfg.decay_sigma + cfg.decay_epsilon0);
        Verdict v;
        v.check = "decay_slope_" + series.labels[i];
        v.window = {{cfg.decay_fit_t0, cfg.decay_fit_t1}};
        v.value_key = "slope";
        v.value = fit.slope;
        v.pass = std::abs(fit.slope - predicted) <= cfg.decay_slope_tol;
        v.details = "predicted " + NormSeries::format_double(predicted) + ", tolerance "
                  + NormSeries::format_double(cfg.decay_slope_tol) + ", residual rms "
                  + NormSeries::format_double(fit.residual_rms);
        checks.push_back(v);

        if (plan[i].first == DecayComponent::u) {
            // the compensated series ||.||(1+t)^{(k+sigma)/2} must be flat
            // up to the profile shift: slope within 0.05 of -eps0/2
            Verdict c;
            c.check = "compensated_" + series.labels[i];
            c.window = v.window;
            c.value_key = "slope";
            c.value = fit.slope + 0.5 * (k + cfg.decay_sigma);
            c.pass = std::abs(c.value + 0.5 * cfg.decay_epsilon0) <= 0.05;
            c.details = "expected " + NormSeries::format_double(-0.5 * cfg.decay_epsilon0)
                      + " ± 0.05";
            checks.push_back(c);
        }
    }

    // exponent structure: one derivative or the u -> tau switch costs
    // exactly half a power of t
    auto find_series = [&](DecayComponent comp, double k) -> int {
        for (std::size_t i = 0; i < plan.size(); ++i)
            if (plan[i].first == comp && plan[i].second == k) return static_cast<int>(i);
        return -1;
    };
    int u0 = find_series(DecayComponent::u, 0.0);
    int u1 = find_series(DecayComponent::u, 1.0);
    int t0 = find_series(DecayComponent::tau, 0.0);
    if (u0 >= 0 && t0 >= 0) {
        Verdict v;
        v.check = "gap_tau_minus_u";
        v.value_key = "slope";
        v.value = slopes[static_cast<std::size_t>(t0)] - slopes[static_cast<std::size_t>(u0)];
        v.pass = std::abs(v.value + 0.5) <= 0.08;
        v.details = "expected -0.5 ± 0.08";
        checks.push_back(v);
    }
    if (u0 >= 0 && u1 >= 0) {
        Verdict v;
        v.check = "gap_k1_minus_k0";
        v.value_key = "slope";
        v.value = slopes[static_cast<std::size_t>(u1)] - slopes[static_cast<std::size_t>(u0)];
        v.pass = std::abs(v.value + 0.5) <= 0.08;
        v.details = "expected -0.5 ± 0.08";
        checks.push_back(v);
    }

    nlohmann::ordered_json run;
    run["d"] = cfg.d;
    run["sigma"] = cfg.decay_sigma;
    run["epsilon0"] = cfg.decay_epsilon0;
    detail::write_verdicts(out_dir / cfg.out_verdicts, "linear-decay", checks, run);

    int code = detail::exit_code(checks);
    log << "linear-decay: " << series.times.size() << " times, " << plan.size()
        << " series, exit " << code << "\n";
    return code;
}

// --------------------------------------------------------- invariant suites

inline int cmd_check_invariants(const RunConfig& cfg, const std::filesystem::path& out_dir,
                                std::ostream& log) {
    std::filesystem::create_directories(out_dir);
    std::vector<Verdict> checks;

    SpectrumShape sweep_shape;
    sweep_shape.exponent = -1.0;
    sweep_shape.cutoff = 8.0;
    sweep_shape.jitter = true;

    // partition of unity on both reference grids
    for (auto [d, n] : {std::pair{2, cfg.inv_n2}, std::pair{3, cfg.inv_n1}}) {
        Grid g(d, n, cfg.L);
        DyadicPartition part(g);
        Verdict v;
        v.check = "partition_of_unity_d" + std::to_string(d);
        v.value = part.partition_residual();
        v.pass = v.value <= 1e-12;
        v.details = "grid " + std::to_string(n) + "^" + std::to_string(d)
                  + ", tolerance 1e-12";
        checks.push_back(v);
    }

    // exact cancellation on random pairs
    for (auto [d, n] : {std::pair{2, cfg.inv_n2}, std::pair{3, cfg.inv_n1}}) {
        Grid g(d, n, cfg.L);
        double worst = 0.0;
        for (int i = 0; i < cfg.inv_cancellation_pairs; ++i) {
            std::uint64_t s = mix_key({cfg.seed, static_cast<std::uint64_t>(i)});
            VectorField u = random_vector(g, s, tags::sweep_a, sweep_shape);
            SymTensorField tau = random_symtensor(g, s, tags::sweep_b, sweep_shape);
            for (double k : {0.0, 1.0, 2.5})
                worst = std::max(worst, cancellation_check(u, tau, k));
        }
        Verdict v;
        v.check = "cancellation_d" + std::to_string(d);
        v.value = worst;
        v.pass = worst <= 1e-10;
        v.details = std::to_string(cfg.inv_cancellation_pairs)
                  + " pairs, k in {0, 1, 2.5}, tolerance 1e-10";
        checks.push_back(v);
    }

    // interpolation with constant 1
    struct InterpCase { int d, n; double s, sigma; };
    for (InterpCase ic : {InterpCase{2, cfg.inv_n2, 1.0, 0.5}, InterpCase{3, cfg.inv_n1, 2.0, 1.0}}) {
        Grid g(ic.d, ic.n, cfg.L);
        double worst = -std::numeric_limits<double>::infinity();
        int violations = 0;
        for (int i = 0; i < cfg.inv_interpolation_fields; ++i) {
            std::uint64_t s = mix_key({cfg.seed, static_cast<std::uint64_t>(i), 7ULL});
            ScalarField f = random_scalar(g, s, tags::sweep_c, sweep_shape);
            f.scale(1.0 / f.coeff_norm());
            double e = interpolation_excess(f, ic.s, ic.sigma);
            worst = std::max(worst, e);
            if (e > 1e-12) ++violations;
        }
        Verdict v;
        v.check = "interpolation_d" + std::to_string(ic.d);
        v.value = worst;
        v.pass = violations == 0;
        v.details = std::to_string(cfg.inv_interpolation_fields) + " fields, (s, sigma) = ("
                  + NormSeries::format_double(ic.s) + ", " + NormSeries::format_double(ic.sigma)
                  + "), " + std::to_string(violations) + " violations beyond 1e-12";
        checks.push_back(v);
    }

    // two-sided Bernstein ratio on every populated shell
    for (auto [d, n] : {std::pair{2, cfg.inv_n2}, std::pair{3, cfg.inv_n1}}) {
        Grid g(d, n, cfg.L);
        DyadicPartition part(g);
        ScalarField f = random_scalar(g, cfg.seed, tags::sweep_c, sweep_shape);
        int violations = 0;
        double worst_dev = 0.0;
        for (double alpha : {0.5, 1.0}) {
            double lo = std::pow(2.0, -2.0 * alpha), hi = std::pow(2.0, 2.0 * alpha);
            for (int j = part.j_min(); j <= part.j_max(); ++j) {
                double r = bernstein_derivative_ratio(f, j, alpha, 2.0, part);
                if (r == 0.0) continue;
                if (r < lo || r > hi) ++violations;
                worst_dev = std::max(worst_dev, std::max(lo / r, r / hi));
            }
        }
        Verdict v;
        v.check = "bernstein_d" + std::to_string(d);
        v.value = worst_dev;
        v.pass = violations == 0;
        v.details = "two-sided L2 ratio within [2^{-2a}, 2^{2a}], a in {0.5, 1}; "
                  + std::to_string(violations) + " violations";
        checks.push_back(v);
    }

    // commutator and product ratio sweeps (statistical, soft)
    std::vector<double> comm_max(2), prod_max(2);
    int grid_idx = 0;
    for (int n : {cfg.inv_n1, cfg.inv_n2}) {
        Grid g(2, n, cfg.L);
        DyadicPartition part(g);
        std::vector<double> comm_ratios, prod_ratios;
        for (int i = 0; i < cfg.inv_samples; ++i) {
            std::uint64_t s = mix_key({cfg.seed, static_cast<std::uint64_t>(i), 13ULL});
            VectorField u = random_solenoidal(g, s, tags::sweep_a, sweep_shape);
            ScalarField v = random_scalar(g, s, tags::sweep_b, sweep_shape);
            SymTensorField tau = random_symtensor(g, s, tags::sweep_c, sweep_shape);
            comm_ratios.push_back(commutator_check(u, v, 1.0, part).ratio);
            prod_ratios.push_back(product_estimate_check(u, tau, cfg.model.b, part));
        }
        RatioStats cs = summarize_ratios(comm_ratios);
        RatioStats ps = summarize_ratios(prod_ratios);
        comm_max[static_cast<std::size_t>(grid_idx)] = cs.max;
        prod_max[static_cast<std::size_t>(grid_idx)] = ps.max;

        Verdict vc;
        vc.check = "commutator_uniformity_N" + std::to_string(n);
        vc.value_key = "ratio";
        vc.value = cs.max_over_median;
        vc.pass = cs.max_over_median < 20.0;
        vc.soft = true;
        vc.details = std::to_string(cfg.inv_samples) + " samples, s = 1, max "
                   + NormSeries::format_double(cs.max) + ", median "
                   + NormSeries::format_double(cs.median);
        checks.push_back(vc);

        Verdict vp;
        vp.check = "product_uniformity_N" + std::to_string(n);
        vp.value_key = "ratio";
        vp.value = ps.max_over_median;
        vp.pass = ps.max_over_median < 20.0;
        vp.soft = true;
        vp.details = std::to_string(cfg.inv_samples) + " samples, max "
                   + NormSeries::format_double(ps.max) + ", median "
                   + NormSeries::format_double(ps.median);
        checks.push_back(vp);
        ++grid_idx;
    }
    {
        Verdict v;
        v.check = "commutator_grid_stability";
        v.value_key = "ratio";
        v.value = std::max(comm_max[1] / comm_max[0], comm_max[0] / comm_max[1]);
        v.pass = v.value < 2.0;
        v.soft = true;
        v.details = "max-ratio change under N doubling";
        checks.push_back(v);
        v.check = "product_grid_stability";
        v.value = std::max(prod_max[1] / prod_max[0], prod_max[0] / prod_max[1]);
        v.pass = v.value < 2.0;
        v.details = "max-ratio change under N doubling";
        checks.push_back(v);
    }

    nlohmann::ordered_json run;
    run["seed"] = cfg.seed;
    run["samples"] = cfg.inv_samples;
    run["grids"] = {cfg.inv_n1, cfg.inv_n2};
    detail::write_verdicts(out_dir / cfg.out_verdicts, "check-invariants", checks, run);

    int code = detail::exit_code(checks);
    log << "check-invariants: " << checks.size() << " checks, exit " << code << "\n";
    return code;
}

// --------------------------------------------------------------------- fit

inline int cmd_fit(const std::string& csv_path, const std::string& label, double t0, double t1,
                   const std::optional<std::filesystem::path>& out_path, std::ostream& log) {
    std::ifstream in(csv_path);
    if (!in) {
        log << "fit: cannot open '" << csv_path << "'\n";
        return 1;
    }
    NormSeries series = NormSeries::from_csv(in);
    FitResult fit = fit_decay(series.times, series.col(label), t0, t1);

    nlohmann::ordered_json j;
    j["command"] = "fit";
    j["series"] = label;
    j["window"] = {t0, t1};
    j["slope"] = fit.slope;
    j["intercept"] = fit.intercept;
    j["residual_rms"] = fit.residual_rms;
    j["count"] = fit.count;
    j["algebraic"] = fit.algebraic;
    std::string text = j.dump(2) + "\n";
    log << text;
    if (out_path) detail::write_text(*out_path, text);
    return 0;
}

} // namespace oldroyd
