#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sigest/estimator.hpp"
#include "sigest/stats.hpp"

namespace sigest {

enum class ExperimentKind { bias, variance, allocation };
enum class ScalePreset { desk, paper };

const char* experiment_kind_name(ExperimentKind k);

// Configuration of one rate experiment, mirrored one-to-one by the key-value
// config files and run manifests.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::variance;
    ScalePreset preset = ScalePreset::desk;
    std::vector<double> H_list = {0.40, 0.50, 0.60};
    std::vector<long> sweep;  // n values (bias), K values (variance), N budgets (allocation)
    double delta = 0.1;
    double theta = 1.0;
    double sigma = 1.0;
    int d = 2;
    int M = 4;
    int reps = 200;
    int bootstrap_B = 2000;
    std::uint64_t master_seed = 20250801;
    long bias_K = 10000;     // blocks held fixed in the bias experiment
    long variance_n = 100;   // points per block held fixed in the variance experiment
    long gt_mesh_L = 1024;   // production mesh for H < 1/2 ground truth
    int threads = 0;         // 0 = all cores

    // Fills kind-dependent defaults (sweep, delta, reps, ...) that the user
    // did not override.
    void apply_preset();
    void validate() const;
};

struct CellResult {
    long sweep_value = 0;
    double mse = 0.0;
    double se = 0.0;
    long n_used = 0;
    long K_used = 0;
    double mean_err_sq = 0.0;  // ||mean estimate - gt||^2, the bias diagnostic
};

struct HResult {
    double H = 0.0;
    std::vector<CellResult> cells;
    RegressionResult regression;      // log10(MSE) on log10(sweep x)
    double bound_slope = 0.0;         // theoretical target (upper bound), from theory_exponents
    double mean_err_slope = 0.0;      // diagnostic: slope of ||mean error||^2 (bias kind only)
};

struct ExperimentResult {
    ExperimentConfig cfg;
    std::vector<HResult> per_H;
};

// The regression abscissa for a cell: n-1 (bias), K (variance), N (allocation).
double regression_x(ExperimentKind kind, const CellResult& cell);

// Runs the experiment.  on_cell, when set, is invoked after every finished
// cell so the caller can flush partial results; a failing cell aborts the run
// (after the callback has seen all finished cells).
ExperimentResult run_experiment(
    const ExperimentConfig& cfg,
    const std::function<void(double /*H*/, const CellResult&)>& on_cell = nullptr,
    const std::function<void(const std::string&)>& log = nullptr);

}  // namespace sigest
