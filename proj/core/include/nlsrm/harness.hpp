#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "nlsrm/distributions.hpp"
#include "nlsrm/nonlinearity.hpp"

namespace nlsrm {

std::string version();

enum class ExperimentKind { signed_sweep, sbm_sweep, esd, decompose_check, predict };

std::string to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string& s);

/// i.i.d. noise for the signed (Wigner) model.
struct WignerNoise {
    Distribution noise = Distribution::gaussian(0.0, 1.0);
};

/// Two-block noise; the block means are set by the sweep (Delta = 2 c n^(alpha - 1/2)).
struct BlockNoise {
    Distribution within = Distribution::gaussian(0.0, 1.0);
    Distribution across = Distribution::gaussian(0.0, 1.0);
    double beta = 0.5;
};

using NoiseModel = std::variant<WignerNoise, BlockNoise>;

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::signed_sweep;
    std::vector<std::size_t> n_list;
    std::vector<double> c_grid;
    double alpha = 0.0;
    unsigned trials_per_point = 8;
    std::uint64_t base_seed = 0;
    NonlinearFn f = NonlinearFn::identity();
    NoiseModel noise = WignerNoise{};
    std::filesystem::path output_dir = ".";
    int bins = 40;
    std::optional<std::pair<double, double>> range;  // esd histogram range; automatic when absent
};

/// Parses and validates a config document. Unknown keys anywhere are rejected.
/// Throws ConfigError.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical JSON form; parse_config(config_to_json(c)) == c.
nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// FNV-1a 64 of the canonical JSON without output_dir, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

struct RunOptions {
    unsigned threads = 1;  // 0: hardware concurrency
};

/// Runs task(i) for i in [0, count) on `threads` workers. Tasks are claimed in index
/// order; if any throw, the exception of the lowest failing index is rethrown after
/// all workers finish.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& task);

/// Seed of trial `trial` at size n. It does not depend on c, so every point of a
/// c-grid sees the same noise and signal draws.
std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t n, unsigned trial);

struct SignedTrial {
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double corr_u1_ones = 0.0;
    double corr_u2_zeta = 0.0;
    double corr_u1_zeta = 0.0;
    double corr_u2_ones = 0.0;
};

/// One draw of f(W + lambda sqrt(n) x x^T)/sqrt(n), lambda = c n^alpha, scored on
/// its top two eigenpairs.
SignedTrial run_signed_trial(const NonlinearFn& f, const Distribution& noise, std::size_t n, double c,
                             double alpha, std::uint64_t seed);

/// Mean gap between the blocks for the sweep parameterization.
double block_gap(std::size_t n, double c, double alpha);

struct Artifact {
    std::filesystem::path path;
    std::string description;
};

std::vector<Artifact> run_signed_sweep(const ExperimentConfig& cfg, const RunOptions& opt = {});
std::vector<Artifact> run_sbm_sweep(const ExperimentConfig& cfg, const RunOptions& opt = {});
std::vector<Artifact> run_esd(const ExperimentConfig& cfg, const RunOptions& opt = {});
std::vector<Artifact> run_decompose_check(const ExperimentConfig& cfg, const RunOptions& opt = {});
std::vector<Artifact> run_predict(const ExperimentConfig& cfg, const RunOptions& opt = {});

/// Dispatches on cfg.experiment.
std::vector<Artifact> run_experiment(const ExperimentConfig& cfg, const RunOptions& opt = {});

}  // namespace nlsrm
