#include "nlsrm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <thread>

#include <fmt/format.h>

#include "nlsrm/decomposition.hpp"
#include "nlsrm/error.hpp"
#include "nlsrm/json_io.hpp"
#include "nlsrm/matrixgen.hpp"
#include "nlsrm/rng.hpp"
#include "nlsrm/sbm.hpp"
#include "nlsrm/spectral.hpp"
#include "nlsrm/table.hpp"
#include "nlsrm/theory.hpp"

#ifndef NLSRM_VERSION
#define NLSRM_VERSION "0.0.0"
#endif

namespace nlsrm {

namespace {

using nlohmann::json;

constexpr unsigned kMaxTrials = 1u << 20;

bool non_negative_integer(const json& v) {
    return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

template <class T>
std::vector<T> array_of(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) throw ConfigError(std::string("config: missing \"") + key + "\"");
    if (!it->is_array()) throw ConfigError(std::string("config: \"") + key + "\" must be an array");
    std::vector<T> out;
    for (const auto& v : *it) {
        if constexpr (std::is_integral_v<T>) {
            if (!non_negative_integer(v)) throw ConfigError(std::string("config: \"") + key + "\" must hold positive integers");
        } else {
            if (!v.is_number()) throw ConfigError(std::string("config: \"") + key + "\" must hold numbers");
        }
        out.push_back(v.get<T>());
    }
    return out;
}

double number_at(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) throw ConfigError(std::string("config: missing \"") + key + "\"");
    if (!it->is_number()) throw ConfigError(std::string("config: \"") + key + "\" must be a number");
    return it->get<double>();
}

void validate(const ExperimentConfig& cfg) {
    if (cfg.n_list.empty()) throw ConfigError("config: n_list must be nonempty");
    for (const auto n : cfg.n_list)
        if (n < 4) throw ConfigError("config: every n must be at least 4");
    if (cfg.c_grid.empty()) throw ConfigError("config: c_grid must be nonempty");
    for (const double c : cfg.c_grid)
        if (!std::isfinite(c)) throw ConfigError("config: c_grid must be finite");
    for (std::size_t i = 1; i < cfg.c_grid.size(); ++i)
        if (!(cfg.c_grid[i] > cfg.c_grid[i - 1])) throw ConfigError("config: c_grid must be strictly increasing");
    if (!(cfg.alpha >= 0.0 && cfg.alpha < 0.5)) throw ConfigError("config: alpha must lie in [0, 0.5)");
    if (cfg.trials_per_point < 1) throw ConfigError("config: trials_per_point must be at least 1");
    if (cfg.trials_per_point >= kMaxTrials) throw ConfigError("config: trials_per_point is too large");
    if (cfg.bins < 1) throw ConfigError("config: bins must be at least 1");
    if (cfg.range && !(cfg.range->first < cfg.range->second)) throw ConfigError("config: range must satisfy lo < hi");

    if (const auto* b = std::get_if<BlockNoise>(&cfg.noise)) {
        try {
            for (const auto n : cfg.n_list) SbmSpec(n, b->beta, b->within, b->across);
            if (cfg.experiment == ExperimentKind::sbm_sweep || cfg.experiment == ExperimentKind::esd) {
                (void)shifted(b->within, 0.0);
                (void)shifted(b->across, 0.0);
            }
        } catch (const ParameterError& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
    } else if (cfg.experiment == ExperimentKind::sbm_sweep) {
        throw ConfigError("config: sbm-sweep needs distributions.within and distributions.across");
    }
}

std::string fnv1a64_hex(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return fmt::format("{:016x}", h);
}

std::vector<std::string> header_comments(const ExperimentConfig& cfg) {
    return {fmt::format("nlsrm {} {} config_hash={}", version(), to_string(cfg.experiment), config_hash(cfg))};
}

json index_json(const Index& i) { return i ? json(*i) : json("inf"); }

std::string cell(double v) { return format_number(v); }
std::string cell(std::uint64_t v) { return std::to_string(v); }

std::filesystem::path write_json(const std::filesystem::path& path, const json& j) {
    write_text(path, j.dump(2) + "\n");
    return path;
}

json provenance(const ExperimentConfig& cfg) {
    return {{"version", version()}, {"experiment", to_string(cfg.experiment)}, {"config_hash", config_hash(cfg)}};
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Sweep points in n-major, then c, then trial order.
struct Point {
    std::size_t n;
    double c;
    unsigned trial;
    std::uint64_t seed;
};

std::vector<Point> sweep_points(const ExperimentConfig& cfg) {
    std::vector<Point> out;
    for (const auto n : cfg.n_list)
        for (const double c : cfg.c_grid)
            for (unsigned t = 0; t < cfg.trials_per_point; ++t) out.push_back({n, c, t, trial_seed(cfg.base_seed, n, t)});
    return out;
}

// Noise-only spectral parameters (beta, sigma, sigma_bar) of the transformed matrix.
struct NoiseProfile {
    double beta, sigma, sigma_bar;
};

NoiseProfile noise_profile(const ExperimentConfig& cfg) {
    if (const auto* w = std::get_if<WignerNoise>(&cfg.noise)) {
        const double s = sd_f(cfg.f, w->noise);
        return {0.5, s, s};
    }
    const auto& b = std::get<BlockNoise>(cfg.noise);
    return {b.beta, sd_f(cfg.f, b.within), sd_f(cfg.f, b.across)};
}

std::vector<double> linear_grid(double lo, double hi, std::size_t count) {
    std::vector<double> g(count);
    for (std::size_t i = 0; i < count; ++i) g[i] = lo + (hi - lo) * (static_cast<double>(i) + 0.5) / static_cast<double>(count);
    return g;
}

std::pair<double, double> spectrum_range(const ExperimentConfig& cfg, const NoiseProfile& p) {
    if (cfg.range) return *cfg.range;
    if (!(p.sigma > 0.0) || !(p.sigma_bar > 0.0)) throw ConfigError("config: degenerate noise; give an explicit range");
    const double edge = qve_right_edge(p.beta, p.sigma, p.sigma_bar).edge;
    return {-1.25 * edge, 1.25 * edge};
}

RegimePrediction predict_point(const ExperimentConfig& cfg, double c) {
    if (const auto* w = std::get_if<WignerNoise>(&cfg.noise)) return signed_recovery_prediction(cfg.f, w->noise, c, cfg.alpha);
    const auto& b = std::get<BlockNoise>(cfg.noise);
    return sbm_recovery_prediction(cfg.f, b.within, b.across, c, cfg.alpha, b.beta);
}

json indices_json(const ExperimentConfig& cfg) {
    if (const auto* w = std::get_if<WignerNoise>(&cfg.noise)) {
        const auto [ie, io] = even_odd_index(cfg.f, w->noise);
        return {{"I_e", index_json(ie)}, {"I_o", index_json(io)}};
    }
    const auto& b = std::get<BlockNoise>(cfg.noise);
    const auto [js, jc] = signal_constant_index(cfg.f, b.within, b.across);
    return {{"J_s", index_json(js)}, {"J_c", index_json(jc)}};
}

json theory_json(const ExperimentConfig& cfg) {
    json out = provenance(cfg);
    out["model"] = std::holds_alternative<WignerNoise>(cfg.noise) ? "signed" : "sbm";
    out["alpha"] = cfg.alpha;
    out["indices"] = indices_json(cfg);
    json preds = json::array();
    for (const double c : cfg.c_grid) preds.push_back({{"c", c}, {"prediction", to_json(predict_point(cfg, c))}});
    out["predictions"] = std::move(preds);
    return out;
}

Matrix sample_observation(const ExperimentConfig& cfg, const Point& p) {
    if (const auto* w = std::get_if<WignerNoise>(&cfg.noise)) {
        const Matrix noise = sample_wigner(p.n, w->noise, derive_seed(p.seed, 0));
        const auto x = rademacher_signal(p.n, derive_seed(p.seed, 1));
        return assemble_observation(noise, cfg.f, SpikeParams(p.c, cfg.alpha, p.n), x);
    }
    const auto& b = std::get<BlockNoise>(cfg.noise);
    const auto spec = sbm_with_gap(p.n, b.beta, b.within, b.across, block_gap(p.n, p.c, cfg.alpha));
    return transform_and_embed(sample_sbm_adjacency(spec, p.seed), cfg.f);
}

void require_kind(const ExperimentConfig& cfg, ExperimentKind k) {
    if (cfg.experiment != k)
        throw ConfigError("config: experiment is \"" + to_string(cfg.experiment) + "\", expected \"" + to_string(k) + "\"");
}

}  // namespace

std::string version() { return NLSRM_VERSION; }

std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::signed_sweep: return "signed-sweep";
        case ExperimentKind::sbm_sweep: return "sbm-sweep";
        case ExperimentKind::esd: return "esd";
        case ExperimentKind::decompose_check: return "decompose-check";
        case ExperimentKind::predict: return "predict";
    }
    return "?";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
    for (const auto k : {ExperimentKind::signed_sweep, ExperimentKind::sbm_sweep, ExperimentKind::esd,
                         ExperimentKind::decompose_check, ExperimentKind::predict})
        if (to_string(k) == s) return k;
    throw ConfigError("config: unknown experiment \"" + s + "\"");
}

ExperimentConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    reject_unknown_keys(j,
                        {"experiment", "n_list", "c_grid", "alpha", "trials_per_point", "base_seed", "f",
                         "distributions", "beta", "output_dir", "bins", "range"},
                        "config");
    ExperimentConfig cfg;
    const auto exp = j.find("experiment");
    if (exp == j.end() || !exp->is_string()) throw ConfigError("config: \"experiment\" must be a string");
    cfg.experiment = experiment_kind_from_string(exp->get<std::string>());
    cfg.n_list = array_of<std::size_t>(j, "n_list");
    cfg.c_grid = array_of<double>(j, "c_grid");
    cfg.alpha = number_at(j, "alpha");
    if (j.contains("trials_per_point")) {
        if (!j["trials_per_point"].is_number_integer()) throw ConfigError("config: trials_per_point must be an integer");
        const auto t = j["trials_per_point"].get<std::int64_t>();
        if (t < 1) throw ConfigError("config: trials_per_point must be at least 1");
        if (t >= kMaxTrials) throw ConfigError("config: trials_per_point is too large");
        cfg.trials_per_point = static_cast<unsigned>(t);
    }
    if (j.contains("base_seed")) {
        if (!non_negative_integer(j["base_seed"])) throw ConfigError("config: base_seed must be a non-negative integer");
        cfg.base_seed = j["base_seed"].get<std::uint64_t>();
    }
    if (!j.contains("f")) throw ConfigError("config: missing \"f\"");
    cfg.f = nonlinear_fn_from_json(j["f"]);

    if (!j.contains("distributions") || !j["distributions"].is_object())
        throw ConfigError("config: \"distributions\" must be an object");
    const json& d = j["distributions"];
    reject_unknown_keys(d, {"noise", "within", "across"}, "distributions");
    if (d.contains("noise")) {
        if (d.contains("within") || d.contains("across"))
            throw ConfigError("distributions: give either \"noise\" or \"within\"/\"across\"");
        if (j.contains("beta")) throw ConfigError("config: \"beta\" applies only to block noise");
        cfg.noise = WignerNoise{distribution_from_json(d["noise"])};
    } else {
        if (!d.contains("within") || !d.contains("across"))
            throw ConfigError("distributions: block noise needs both \"within\" and \"across\"");
        BlockNoise b{distribution_from_json(d["within"]), distribution_from_json(d["across"]), 0.5};
        if (j.contains("beta")) b.beta = number_at(j, "beta");
        cfg.noise = b;
    }
    if (j.contains("output_dir")) {
        if (!j["output_dir"].is_string()) throw ConfigError("config: output_dir must be a string");
        cfg.output_dir = j["output_dir"].get<std::string>();
    }
    if (j.contains("bins")) {
        if (!j["bins"].is_number_integer()) throw ConfigError("config: bins must be an integer");
        cfg.bins = j["bins"].get<int>();
    }
    if (j.contains("range")) {
        const auto r = array_of<double>(j, "range");
        if (r.size() != 2) throw ConfigError("config: range must be [lo, hi]");
        cfg.range = std::pair{r[0], r[1]};
    }
    validate(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return parse_config(j);
}

json config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["experiment"] = to_string(cfg.experiment);
    j["n_list"] = cfg.n_list;
    j["c_grid"] = cfg.c_grid;
    j["alpha"] = cfg.alpha;
    j["trials_per_point"] = cfg.trials_per_point;
    j["base_seed"] = cfg.base_seed;
    j["f"] = to_json(cfg.f);
    if (const auto* w = std::get_if<WignerNoise>(&cfg.noise)) {
        j["distributions"] = {{"noise", to_json(w->noise)}};
    } else {
        const auto& b = std::get<BlockNoise>(cfg.noise);
        j["distributions"] = {{"within", to_json(b.within)}, {"across", to_json(b.across)}};
        j["beta"] = b.beta;
    }
    j["output_dir"] = cfg.output_dir.generic_string();
    j["bins"] = cfg.bins;
    if (cfg.range) j["range"] = {cfg.range->first, cfg.range->second};
    return j;
}

std::string config_hash(const ExperimentConfig& cfg) {
    json j = config_to_json(cfg);
    j.erase("output_dir");
    return fnv1a64_hex(j.dump());
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& task) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                task(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t n, unsigned trial) {
    return derive_seed(base_seed, (static_cast<std::uint64_t>(n) << 20) + trial);
}

double block_gap(std::size_t n, double c, double alpha) {
    const long double root = std::pow(static_cast<long double>(n), static_cast<long double>(alpha) - 0.5L);
    return static_cast<double>(2.0L * static_cast<long double>(c) * root);
}

SignedTrial run_signed_trial(const NonlinearFn& f, const Distribution& noise, std::size_t n, double c, double alpha,
                             std::uint64_t seed) {
    const Matrix w = sample_wigner(n, noise, derive_seed(seed, 0));
    const auto x = rademacher_signal(n, derive_seed(seed, 1));
    const Matrix y = assemble_observation(w, f, SpikeParams(c, alpha, n), x);
    const auto pairs = sym_eig_top(y, 2);
    const Vector ones = Vector::Ones(static_cast<Eigen::Index>(n));
    SignedTrial t;
    t.gamma1 = pairs.values(0);
    t.gamma2 = pairs.values(1);
    t.corr_u1_ones = alignment(pairs.vectors.col(0), ones);
    t.corr_u2_zeta = alignment(pairs.vectors.col(1), x.entries);
    t.corr_u1_zeta = alignment(pairs.vectors.col(0), x.entries);
    t.corr_u2_ones = alignment(pairs.vectors.col(1), ones);
    return t;
}

std::vector<Artifact> run_signed_sweep(const ExperimentConfig& cfg, const RunOptions& opt) {
    require_kind(cfg, ExperimentKind::signed_sweep);
    const auto* w = std::get_if<WignerNoise>(&cfg.noise);
    if (!w) throw ConfigError("config: signed-sweep needs distributions.noise");
    const auto points = sweep_points(cfg);
    std::vector<SignedTrial> results(points.size());
    parallel_for(points.size(), opt.threads, [&](std::size_t i) {
        const auto& p = points[i];
        results[i] = run_signed_trial(cfg.f, w->noise, p.n, p.c, cfg.alpha, p.seed);
    });

    Table t;
    t.comments = header_comments(cfg);
    t.columns = {"n", "c", "trial", "seed", "gamma1", "gamma2", "corr_u1_ones", "corr_u2_zeta", "corr_u1_zeta",
                 "corr_u2_ones"};
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        const auto& r = results[i];
        t.rows.push_back({std::to_string(p.n), cell(p.c), std::to_string(p.trial), cell(p.seed), cell(r.gamma1),
                          cell(r.gamma2), cell(r.corr_u1_ones), cell(r.corr_u2_zeta), cell(r.corr_u1_zeta),
                          cell(r.corr_u2_ones)});
    }
    const auto csv = cfg.output_dir / "signed_sweep.csv";
    write_csv(csv, t);
    const auto theory = write_json(cfg.output_dir / "signed_sweep_theory.json", theory_json(cfg));
    return {{csv, "per-trial top eigenpairs"}, {theory, "theory predictions"}};
}

std::vector<Artifact> run_sbm_sweep(const ExperimentConfig& cfg, const RunOptions& opt) {
    require_kind(cfg, ExperimentKind::sbm_sweep);
    const auto& b = std::get<BlockNoise>(cfg.noise);
    const auto [js, jc] = signal_constant_index(cfg.f, b.within, b.across);
    const int which = (js && jc && *js > *jc) ? 2 : 1;
    const auto points = sweep_points(cfg);
    std::vector<SbmTrialResult> results(points.size());
    parallel_for(points.size(), opt.threads, [&](std::size_t i) {
        const auto& p = points[i];
        const auto spec = sbm_with_gap(p.n, b.beta, b.within, b.across, block_gap(p.n, p.c, cfg.alpha));
        results[i] = run_sbm_trial(spec, cfg.f, p.seed, which);
    });

    Table t;
    t.comments = header_comments(cfg);
    t.columns = {"n",      "beta",   "c",        "alpha",    "seed",    "gamma1",     "gamma2",     "gamma3",
                 "gamma4", "overlap1", "overlap2", "trial", "delta", "alignment1", "alignment2", "recovered_from"};
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        const auto& r = results[i];
        t.rows.push_back({std::to_string(p.n), cell(b.beta), cell(p.c), cell(cfg.alpha), cell(p.seed),
                          cell(r.top_eigenvalues[0]), cell(r.top_eigenvalues[1]), cell(r.top_eigenvalues[2]),
                          cell(r.top_eigenvalues[3]), cell(r.overlap_top), cell(r.overlap_second),
                          std::to_string(p.trial), cell(r.delta), cell(r.alignment_top), cell(r.alignment_second),
                          std::to_string(r.labels_recovered_from)});
    }
    const auto csv = cfg.output_dir / "sbm_sweep.csv";
    write_csv(csv, t);
    const auto theory = write_json(cfg.output_dir / "sbm_sweep_theory.json", theory_json(cfg));
    return {{csv, "per-trial SBM recovery"}, {theory, "theory predictions"}};
}

std::vector<Artifact> run_esd(const ExperimentConfig& cfg, const RunOptions& opt) {
    require_kind(cfg, ExperimentKind::esd);
    const NoiseProfile prof = noise_profile(cfg);
    const auto range = spectrum_range(cfg, prof);
    const auto points = sweep_points(cfg);
    std::vector<Vector> spectra(points.size());
    parallel_for(points.size(), opt.threads,
                 [&](std::size_t i) { spectra[i] = sym_eigenvalues(sample_observation(cfg, points[i])); });

    const auto tau = linear_grid(range.first, range.second, 4 * static_cast<std::size_t>(cfg.bins));
    const auto rho = spectral_density_from_qve(prof.beta, prof.sigma, prof.sigma_bar, tau);

    Table t;
    t.comments = header_comments(cfg);
    t.columns = {"n", "c", "series", "x", "density"};
    const std::size_t per_point = cfg.trials_per_point;
    for (std::size_t g = 0; g < points.size(); g += per_point) {
        std::size_t total = 0;
        for (std::size_t i = g; i < g + per_point; ++i) total += static_cast<std::size_t>(spectra[i].size());
        Vector pooled(static_cast<Eigen::Index>(total));
        Eigen::Index at = 0;
        for (std::size_t i = g; i < g + per_point; ++i) {
            pooled.segment(at, spectra[i].size()) = spectra[i];
            at += spectra[i].size();
        }
        const auto n = std::to_string(points[g].n);
        const auto c = cell(points[g].c);
        for (const auto& bin : esd_histogram(pooled, cfg.bins, range))
            t.rows.push_back({n, c, "empirical", cell(bin.center), cell(bin.density)});
        for (const auto& r : rho) t.rows.push_back({n, c, "qve", cell(r.tau), cell(r.rho)});
    }
    const auto csv = cfg.output_dir / "esd.csv";
    write_csv(csv, t);
    return {{csv, "eigenvalue histograms with the QVE density"}};
}

std::vector<Artifact> run_decompose_check(const ExperimentConfig& cfg, const RunOptions& opt) {
    require_kind(cfg, ExperimentKind::decompose_check);
    const auto points = sweep_points(cfg);
    std::vector<DecompositionReport> reports(points.size());
    parallel_for(points.size(), opt.threads, [&](std::size_t i) {
        const auto& p = points[i];
        const SpikeParams sp(p.c, cfg.alpha, p.n);
        if (const auto* w = std::get_if<WignerNoise>(&cfg.noise)) {
            const Matrix noise = sample_wigner(p.n, w->noise, derive_seed(p.seed, 0));
            const auto x = rademacher_signal(p.n, derive_seed(p.seed, 1));
            reports[i] = signal_plus_noise(noise, cfg.f, sp, x, WignerEnsemble{w->noise});
        } else {
            const auto& b = std::get<BlockNoise>(cfg.noise);
            const SbmSpec centered(p.n, b.beta, mean_and_center(b.within).second, mean_and_center(b.across).second);
            const Matrix noise = sample_sbm_adjacency(centered, p.seed);
            const auto u = community_signal(p.n, b.beta).u;
            reports[i] = signal_plus_noise(noise, cfg.f, sp, u, SbmEnsemble{SbmSpec(p.n, b.beta, b.within, b.across)});
        }
        reports[i].noise_part = Matrix();  // keep only the summary
    });

    Table t;
    t.comments = header_comments(cfg);
    t.columns = {"n", "seed", "alpha", "c_lambda", "remainder_norm", "trial", "ell", "gap"};
    Table summary;
    summary.comments = t.comments;
    summary.columns = {"n", "c_lambda", "trials", "median_remainder_norm", "ell", "gap"};
    const std::size_t per_point = cfg.trials_per_point;
    for (std::size_t g = 0; g < points.size(); g += per_point) {
        std::vector<double> norms;
        for (std::size_t i = g; i < g + per_point; ++i) {
            const auto& p = points[i];
            const auto& r = reports[i];
            t.rows.push_back({std::to_string(p.n), cell(p.seed), cell(cfg.alpha), cell(p.c), cell(r.remainder_norm),
                              std::to_string(p.trial), std::to_string(r.ell), r.gap ? "true" : "false"});
            norms.push_back(r.remainder_norm);
        }
        const auto& r = reports[g];
        summary.rows.push_back({std::to_string(points[g].n), cell(points[g].c), std::to_string(per_point),
                                cell(median(norms)), std::to_string(r.ell), r.gap ? "true" : "false"});
    }
    const auto csv = cfg.output_dir / "decompose_check.csv";
    const auto sum = cfg.output_dir / "decompose_check_summary.csv";
    write_csv(csv, t);
    write_csv(sum, summary);
    return {{csv, "per-trial remainder norms"}, {sum, "median remainder per (n, c)"}};
}

std::vector<Artifact> run_predict(const ExperimentConfig& cfg, const RunOptions& opt) {
    require_kind(cfg, ExperimentKind::predict);
    json out = theory_json(cfg);
    json strengths = json::array();
    for (const auto n : cfg.n_list)
        for (const double c : cfg.c_grid) {
            json row{{"n", n}, {"c", c}, {"lambda", SpikeParams(c, cfg.alpha, n).lambda()}};
            if (std::holds_alternative<BlockNoise>(cfg.noise)) row["delta"] = block_gap(n, c, cfg.alpha);
            strengths.push_back(std::move(row));
        }
    out["strengths"] = std::move(strengths);
    const NoiseProfile prof = noise_profile(cfg);
    out["noise"] = {{"beta", prof.beta}, {"sigma", prof.sigma}, {"sigma_bar", prof.sigma_bar}};
    const auto json_path = write_json(cfg.output_dir / "prediction.json", out);

    const auto range = spectrum_range(cfg, prof);
    const auto tau = linear_grid(range.first, range.second, 8 * static_cast<std::size_t>(cfg.bins));
    std::vector<std::vector<DensityPoint>> chunks(1);
    parallel_for(1, opt.threads, [&](std::size_t) {
        chunks[0] = spectral_density_from_qve(prof.beta, prof.sigma, prof.sigma_bar, tau);
    });
    Table t;
    t.comments = header_comments(cfg);
    t.columns = {"tau", "rho"};
    for (const auto& r : chunks[0]) t.rows.push_back({cell(r.tau), cell(r.rho)});
    const auto csv = cfg.output_dir / "density.csv";
    write_csv(csv, t);
    return {{json_path, "regime predictions"}, {csv, "QVE spectral density of the noise"}};
}

std::vector<Artifact> run_experiment(const ExperimentConfig& cfg, const RunOptions& opt) {
    switch (cfg.experiment) {
        case ExperimentKind::signed_sweep: return run_signed_sweep(cfg, opt);
        case ExperimentKind::sbm_sweep: return run_sbm_sweep(cfg, opt);
        case ExperimentKind::esd: return run_esd(cfg, opt);
        case ExperimentKind::decompose_check: return run_decompose_check(cfg, opt);
        case ExperimentKind::predict: return run_predict(cfg, opt);
    }
    throw ConfigError("config: unknown experiment");
}

}  // namespace nlsrm
