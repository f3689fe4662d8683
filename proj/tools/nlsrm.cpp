#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "nlsrm/error.hpp"
#include "nlsrm/harness.hpp"
#include "nlsrm/plot.hpp"

namespace {

enum ExitCode { ok = 0, config_error = 2, convergence_error = 3, io_error = 4 };

// OpenBLAS picks its kernels when the library loads, so a core-type override has to be
// in the environment before the process starts.
void reexec_with_coretype(char** argv) {
#ifdef NLSRM_OPENBLAS_CORETYPE
    if (std::getenv("OPENBLAS_CORETYPE") != nullptr || std::getenv("NLSRM_NO_REEXEC") != nullptr) return;
    ::setenv("OPENBLAS_CORETYPE", NLSRM_OPENBLAS_CORETYPE, 1);
    ::setenv("NLSRM_NO_REEXEC", "1", 1);
    ::execv("/proc/self/exe", argv);
    // fall through and run with the autodetected kernels; eigensolves are still validated
#else
    (void)argv;
#endif
}

struct SweepArgs {
    std::string config;
    std::string out;
    unsigned threads = 1;
    std::optional<std::uint64_t> seed;
};

nlohmann::json read_config_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw nlsrm::IoError("cannot open config " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw nlsrm::ConfigError(path + ": " + e.what());
    }
}

int run_sweep(nlsrm::ExperimentKind kind, const SweepArgs& args) {
    auto j = read_config_json(args.config);
    if (!j.is_object()) throw nlsrm::ConfigError(args.config + ": top level must be an object");
    const auto name = nlsrm::to_string(kind);
    if (!j.contains("experiment")) j["experiment"] = name;
    if (j["experiment"] != name)
        throw nlsrm::ConfigError(args.config + ": experiment is " + j["experiment"].dump() + ", subcommand is " + name);
    if (!args.out.empty()) j["output_dir"] = args.out;
    if (args.seed) j["base_seed"] = *args.seed;
    const auto cfg = nlsrm::parse_config(j);
    for (const auto& a : nlsrm::run_experiment(cfg, {args.threads})) std::cout << a.path.string() << "\t" << a.description << "\n";
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    reexec_with_coretype(argv);

    CLI::App app{"Nonlinear spiked random matrix laboratory"};
    app.set_version_flag("--version", nlsrm::version());
    app.require_subcommand(1);

    struct Entry {
        nlsrm::ExperimentKind kind;
        const char* help;
    };
    const std::vector<Entry> sweeps = {
        {nlsrm::ExperimentKind::signed_sweep, "Top eigenpairs of the signed model over an (n, c) grid"},
        {nlsrm::ExperimentKind::sbm_sweep, "Two-block SBM recovery over an (n, c) grid"},
        {nlsrm::ExperimentKind::esd, "Eigenvalue histograms with the QVE density overlay"},
        {nlsrm::ExperimentKind::decompose_check, "Operator norm of the decomposition remainder"},
        {nlsrm::ExperimentKind::predict, "Theory predictions and the noise spectral density"},
    };
    std::vector<SweepArgs> args(sweeps.size());
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < sweeps.size(); ++i) {
        auto* sub = app.add_subcommand(nlsrm::to_string(sweeps[i].kind), sweeps[i].help);
        sub->add_option("--config", args[i].config, "JSON experiment config")->required();
        sub->add_option("--out", args[i].out, "Output directory (overrides output_dir)");
        sub->add_option("--threads", args[i].threads, "Worker threads, 0 for all cores")->capture_default_str();
        sub->add_option("--seed", args[i].seed, "Base seed (overrides base_seed)");
        subs.push_back(sub);
    }

    std::string csv, kind = "lines", out;
    nlsrm::PlotOptions plot_opt;
    auto* plot = app.add_subcommand("plot", "Render a sweep or esd CSV as SVG");
    plot->add_option("--csv", csv, "Input CSV")->required();
    plot->add_option("--kind", kind, "lines or histogram-overlay")->capture_default_str();
    plot->add_option("--x", plot_opt.x, "Abscissa column (lines)")->capture_default_str();
    plot->add_option("--y", plot_opt.y, "Ordinate column (lines)")->capture_default_str();
    plot->add_option("--out", out, "Output SVG path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config_error;
    }

    try {
        for (std::size_t i = 0; i < subs.size(); ++i)
            if (subs[i]->parsed()) return run_sweep(sweeps[i].kind, args[i]);
        if (plot->parsed()) {
            plot_opt.out = out;
            std::cout << nlsrm::emit_plot(csv, nlsrm::plot_kind_from_string(kind), plot_opt).string() << "\n";
            return ok;
        }
    } catch (const nlsrm::ConvergenceError& e) {
        std::cerr << "nlsrm: convergence failure: " << e.what() << "\n";
        return convergence_error;
    } catch (const nlsrm::IoError& e) {
        std::cerr << "nlsrm: " << e.what() << "\n";
        return io_error;
    } catch (const nlsrm::FormatError& e) {
        std::cerr << "nlsrm: " << e.what() << "\n";
        return io_error;
    } catch (const nlsrm::Error& e) {
        std::cerr << "nlsrm: " << e.what() << "\n";
        return config_error;
    }
    return config_error;
}
