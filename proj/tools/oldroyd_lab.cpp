// Command line front end. Subcommands:
//
//   simulate          nonlinear (or linear-only) time integration + monitors
//   linear-decay      Fourier-side decay quadrature for the linearized system
//   check-invariants  randomized identity/inequality suites
//   fit               least-squares decay fit on an existing CSV column
//
// Exit status: 0 all hard checks pass, 2 a soft check failed, 1 error.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "oldroyd/commands.hpp"

namespace {

oldroyd::RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return oldroyd::parse_config(buf.str());
}

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    int threads = 1;
    int repeat = 1;
};

void add_common(CLI::App* cmd, CommonOpts& opt) {
    cmd->add_option("--config", opt.config_path, "run configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", opt.out_dir, "output directory (created if missing)");
    cmd->add_option("--seed", opt.seed, "override init.seed from the config");
    cmd->add_option("--threads", opt.threads, "FFT threads")->check(CLI::PositiveNumber);
    cmd->add_option("--repeat", opt.repeat,
                    "run K times with seeds seed..seed+K-1 into rep0/..rep{K-1}/")
        ->check(CLI::PositiveNumber);
}

template <class Fn>
int run_repeated(const CommonOpts& opt, Fn&& fn) {
    oldroyd::RunConfig cfg = load_config(opt.config_path);
    if (opt.seed) cfg.seed = *opt.seed;
    oldroyd::set_fft_threads(opt.threads);

    int worst = 0;
    for (int i = 0; i < opt.repeat; ++i) {
        oldroyd::RunConfig run = cfg;
        run.seed = cfg.seed + static_cast<std::uint64_t>(i);
        std::filesystem::path dir = opt.out_dir;
        if (opt.repeat > 1) dir /= "rep" + std::to_string(i);
        int code = fn(run, dir);
        if (code == 1) return 1;
        worst = std::max(worst, code);
    }
    return worst;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for the incompressible Oldroyd-B model"};
    app.require_subcommand(1);

    CommonOpts sim_opt, dec_opt, inv_opt;
    CLI::App* sim = app.add_subcommand("simulate", "integrate the PDE system and monitor it");
    add_common(sim, sim_opt);
    CLI::App* dec = app.add_subcommand("linear-decay", "linearized decay norms by quadrature");
    add_common(dec, dec_opt);
    CLI::App* inv = app.add_subcommand("check-invariants", "randomized identity suites");
    add_common(inv, inv_opt);

    std::string fit_csv, fit_label;
    double fit_t0 = 10.0, fit_t1 = 1000.0;
    std::string fit_out;
    CLI::App* fit = app.add_subcommand("fit", "fit log(value) vs log(1+t) on a CSV column");
    fit->add_option("--csv", fit_csv, "CSV file with a t column")
        ->required()
        ->check(CLI::ExistingFile);
    fit->add_option("--label", fit_label, "column to fit")->required();
    fit->add_option("--t0", fit_t0, "window start");
    fit->add_option("--t1", fit_t1, "window end");
    fit->add_option("--out", fit_out, "also write the fit JSON to this file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed())
            return run_repeated(sim_opt, [](const oldroyd::RunConfig& c,
                                            const std::filesystem::path& d) {
                return oldroyd::cmd_simulate(c, d, std::cout);
            });
        if (dec->parsed())
            return run_repeated(dec_opt, [](const oldroyd::RunConfig& c,
                                            const std::filesystem::path& d) {
                return oldroyd::cmd_linear_decay(c, d, std::cout);
            });
        if (inv->parsed())
            return run_repeated(inv_opt, [](const oldroyd::RunConfig& c,
                                            const std::filesystem::path& d) {
                return oldroyd::cmd_check_invariants(c, d, std::cout);
            });
        if (fit->parsed()) {
            std::optional<std::filesystem::path> out;
            if (!fit_out.empty()) out = fit_out;
            return oldroyd::cmd_fit(fit_csv, fit_label, fit_t0, fit_t1, out, std::cout);
        }
    } catch (const oldroyd::ConfigError& e) {
        std::cerr << "config error:\n";
        for (const std::string& v : e.violations()) std::cerr << "  " << v << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
