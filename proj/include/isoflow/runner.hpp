#pragma once

#include <optional>

#include "isoflow/analysis.hpp"
#include "isoflow/config.hpp"
#include "isoflow/output.hpp"
#include "isoflow/pointvortex.hpp"

namespace isoflow {

struct RunOutcome {
    std::filesystem::path dir;
    std::int64_t final_step = 0;
    double seconds_per_step = 0;
    double norm_W0 = 0;
};

/// Precompute (basis + Laplacian factorization), time-step, output.
/// Writes diagnostics/frames/checkpoints at the configured cadences, a
/// config snapshot, and a manifest with file checksums. On NonConvergence
/// the last completed state is checkpointed before the exception travels on.
RunOutcome run_simulation(const RunConfig& cfg, const std::optional<std::filesystem::path>& resume = {});

/// Predicted blob count from gamma: 4 below 0.15, 3 up to 0.4, else 2.
int regime_from_gamma(double gamma);

struct SweepRow {
    int run = 0;
    std::uint64_t seed = 0;
    double gamma = 0;
    double gamma_drift = 0;
    int blobs = 0;   // 0 = unclassified
    int regime = 0;
    std::string error;
};

/// count seeded simulations (seed, seed+1, ...) executed concurrently on up
/// to jobs threads, each in out_dir/run_XXX; per-run failures are recorded
/// and the sweep continues. Writes out_dir/sweep_summary.csv.
std::vector<SweepRow> run_sweep(const RunConfig& base, int count, int jobs);

struct AnalyzeOptions {
    double threshold = 0.3;
    double link_radius = 0.5;
    double window_frac = 0.1;
    bool pgm = false;
    bool scatter = true;
};

struct AnalyzeReport {
    int frames = 0;
    int tracks = 0;
    bool axis_ok = false;
    Vec3 axis = Vec3::Zero();
    double axis_residual = 0;
    int blobs = 0;
};

/// Turns a finished run directory into tracks.csv, axis.txt,
/// classification.txt, scatter.csv and optional per-frame PGMs.
AnalyzeReport analyze_run(const std::filesystem::path& run_dir, const AnalyzeOptions& opt);

struct SweepClassRow {
    std::string run;
    double gamma = 0;
    int blobs = 0;
    int regime = 0;
};

/// Re-classifies every run_* subdirectory of a sweep and writes
/// regime_table.csv (run, gamma, blobs, regime).
std::vector<SweepClassRow> analyze_sweep(const std::filesystem::path& sweep_dir, const AnalyzeOptions& opt);

struct PVRunOptions {
    double h = 0.01;
    std::int64_t steps = 1000;
    std::int64_t d_every = 10;
    bool solve_strengths = false;  // recompute strengths from positions (Gamma_1 = 1)
};

/// Integrates the vortices and writes trajectory.csv and invariants.csv.
void run_point_vortex(const std::filesystem::path& data, const std::filesystem::path& out_dir,
                      const PVRunOptions& opt);

}  // namespace isoflow
