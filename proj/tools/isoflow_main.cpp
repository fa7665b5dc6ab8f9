#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "isoflow/runner.hpp"

using namespace isoflow;

namespace {

constexpr int kExitOk = 0, kExitUsage = 2, kExitNumerical = 3;

struct CliOverrides {
    CLI::App* cmd = nullptr;
    std::string config_file;
    RunConfig staged;

    void attach(CLI::App& app) {
        cmd = &app;
        app.add_option("--config", config_file, "configuration file (key = value)");
        app.add_option("--n", staged.n, "matrix size N");
        app.add_option("--h", staged.h, "dimensionless time step");
        app.add_option("--steps", staged.steps, "number of steps");
        app.add_option("--integrator", staged.integrator, "isomp | heun");
        app.add_option("--tol", staged.tol, "IsoMP fixed-point tolerance");
        app.add_option("--max-iters", staged.max_iters, "IsoMP iteration cap");
        app.add_option("--omega", staged.omega_rotation, "rotation rate Omega (0 disables Coriolis)");
        app.add_option("--ic", staged.ic, "random_l2 | random_l2_zero_momentum | gauss_blobs | rh_wave");
        app.add_option("--seed", staged.seed, "RNG seed");
        app.add_option("--eps", staged.ic_eps, "spectral decay offset for random ICs");
        app.add_option("--ic-file", staged.ic_file, "blob CSV for gauss_blobs");
        app.add_option("--rh-c", staged.rh_c, "RH wave C");
        app.add_option("--rh-l", staged.rh_l, "RH wave l");
        app.add_option("--rh-amps", staged.rh_amps, "RH amplitudes, m:re[:im] comma list");
        app.add_option("--rh-zonal", staged.rh_zonal, "extra zonal W^{10}");
        app.add_option("--d-every", staged.d_every, "diagnostics cadence");
        app.add_option("--f-every", staged.f_every, "frame cadence (0 = off)");
        app.add_option("--c-every", staged.c_every, "checkpoint cadence (0 = off)");
        app.add_option("--e-every", staged.e_every, "eigenvalue snapshot cadence (0 = off)");
        app.add_option("--out-dir", staged.out_dir, "output directory");
        app.add_option("--grid-phi", staged.grid_phi, "raster azimuth samples");
        app.add_option("--grid-theta", staged.grid_theta, "raster inclination samples");
    }

    RunConfig resolve() const {
        RunConfig cfg = config_file.empty() ? RunConfig{} : load_config(config_file);
        auto take = [&](const char* flag, auto member) {
            if (cmd->count(flag)) cfg.*member = staged.*member;
        };
        take("--n", &RunConfig::n);
        take("--h", &RunConfig::h);
        take("--steps", &RunConfig::steps);
        take("--integrator", &RunConfig::integrator);
        take("--tol", &RunConfig::tol);
        take("--max-iters", &RunConfig::max_iters);
        take("--omega", &RunConfig::omega_rotation);
        take("--ic", &RunConfig::ic);
        take("--seed", &RunConfig::seed);
        take("--eps", &RunConfig::ic_eps);
        take("--ic-file", &RunConfig::ic_file);
        take("--rh-c", &RunConfig::rh_c);
        take("--rh-l", &RunConfig::rh_l);
        take("--rh-amps", &RunConfig::rh_amps);
        take("--rh-zonal", &RunConfig::rh_zonal);
        take("--d-every", &RunConfig::d_every);
        take("--f-every", &RunConfig::f_every);
        take("--c-every", &RunConfig::c_every);
        take("--e-every", &RunConfig::e_every);
        take("--out-dir", &RunConfig::out_dir);
        take("--grid-phi", &RunConfig::grid_phi);
        take("--grid-theta", &RunConfig::grid_theta);
        return cfg;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"isoflow: structure-preserving simulator for the quantized Euler equations on the sphere"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "print help");  // keep -h free for the time step

    // simulate
    auto* sim = app.add_subcommand("simulate", "run one simulation");
    sim->set_help_flag("--help", "print help");
    CliOverrides sim_over;
    sim_over.attach(*sim);
    std::string resume_path;
    sim->add_option("--resume", resume_path, "checkpoint file to continue from");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "run an ensemble of seeded simulations");
    sweep->set_help_flag("--help", "print help");
    CliOverrides sweep_over;
    sweep_over.attach(*sweep);
    int sweep_count = 16, sweep_jobs = 0;
    sweep->add_option("--count", sweep_count, "number of runs");
    sweep->add_option("--jobs", sweep_jobs, "max concurrent runs (0 = hardware)");

    // pv
    auto* pv = app.add_subcommand("pv", "integrate point vortices on the sphere");
    pv->set_help_flag("--help", "print help");
    std::string pv_data, pv_out = "pv_out";
    PVRunOptions pv_opt;
    pv->add_option("--data", pv_data, "CSV of phi,theta,gamma rows")->required();
    pv->add_option("--h", pv_opt.h, "time step");
    pv->add_option("--steps", pv_opt.steps, "number of steps");
    pv->add_option("--d-every", pv_opt.d_every, "output cadence");
    pv->add_option("--out", pv_out, "output directory");
    pv->add_flag("--solve-strengths", pv_opt.solve_strengths, "recompute strengths from positions (Gamma_1 = 1)");

    // analyze
    auto* an = app.add_subcommand("analyze", "extract tracks, axis, classification and scatter from a run");
    an->set_help_flag("--help", "print help");
    std::string an_run;
    AnalyzeOptions an_opt;
    bool an_classify = false;
    an->add_option("--run", an_run, "run directory")->required();
    an->add_option("--threshold", an_opt.threshold, "blob threshold fraction of max |omega|");
    an->add_option("--link-radius", an_opt.link_radius, "track link radius (rad per frame gap)");
    an->add_option("--window-frac", an_opt.window_frac, "classification window as a fraction of frames");
    an->add_flag("--pgm", an_opt.pgm, "export frames as PGM images");
    an->add_flag("--classify", an_classify, "print only the blob count");

    // basis-cache
    auto* bc = app.add_subcommand("basis-cache", "write or verify a quantized basis cache file");
    bc->set_help_flag("--help", "print help");
    int bc_n = 0;
    std::string bc_out, bc_check;
    bc->add_option("--n", bc_n, "matrix size N");
    bc->add_option("--out", bc_out, "cache file to write");
    bc->add_option("--check", bc_check, "cache file to verify");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (sim->parsed()) {
            const RunConfig cfg = sim_over.resolve();
            std::optional<std::filesystem::path> resume;
            if (!resume_path.empty()) resume = resume_path;
            const RunOutcome out = run_simulation(cfg, resume);
            std::printf("run complete: %s (steps=%lld, seconds/step=%.17g)\n", out.dir.string().c_str(),
                        static_cast<long long>(out.final_step), out.seconds_per_step);
        } else if (sweep->parsed()) {
            const RunConfig cfg = sweep_over.resolve();
            const auto rows = run_sweep(cfg, sweep_count, sweep_jobs);
            std::printf("%-4s %-12s %-12s %-8s %-6s %s\n", "run", "seed", "gamma", "blobs", "regime", "error");
            for (const auto& r : rows)
                std::printf("%-4d %-12llu %-12.6f %-8d %-6d %s\n", r.run, static_cast<unsigned long long>(r.seed),
                            r.gamma, r.blobs, r.regime, r.error.c_str());
        } else if (pv->parsed()) {
            run_point_vortex(pv_data, pv_out, pv_opt);
            std::printf("pv run complete: %s\n", pv_out.c_str());
        } else if (an->parsed()) {
            // a directory of run_* subdirectories is a sweep: emit the regime table
            bool is_sweep = false;
            for (const auto& e : std::filesystem::directory_iterator(an_run))
                if (e.is_directory() && e.path().filename().string().rfind("run_", 0) == 0) is_sweep = true;
            if (is_sweep) {
                const auto rows = analyze_sweep(an_run, an_opt);
                std::printf("%-10s %-12s %-6s %s\n", "run", "gamma", "blobs", "regime");
                for (const auto& r : rows) std::printf("%-10s %-12.6f %-6d %d\n", r.run.c_str(), r.gamma, r.blobs, r.regime);
            } else {
                const AnalyzeReport rep = analyze_run(an_run, an_opt);
                if (an_classify) {
                    std::printf("%d\n", rep.blobs);
                } else {
                    std::printf("frames=%d tracks=%d blobs=%d", rep.frames, rep.tracks, rep.blobs);
                    if (rep.axis_ok)
                        std::printf(" axis=(%.6f,%.6f,%.6f) rms=%.6f rad", rep.axis.x(), rep.axis.y(), rep.axis.z(),
                                    rep.axis_residual);
                    std::printf("\n");
                }
            }
        } else if (bc->parsed()) {
            if (!bc_out.empty()) {
                if (bc_n < 2) throw std::invalid_argument("basis-cache: --n must be >= 2");
                QuantBasis::build(bc_n).save_cache(bc_out);
                std::printf("wrote basis cache %s (N=%d)\n", bc_out.c_str(), bc_n);
            } else if (!bc_check.empty()) {
                const QuantBasis b = QuantBasis::load_cache(bc_check);
                double dev = 0.0;
                for (int l = 1; l <= b.l_max(); ++l)
                    for (int m = 0; m <= l; ++m) {
                        double n2 = 0.0;
                        for (double v : b.diagonal(l, m)) n2 += v * v;
                        dev = std::max(dev, std::abs(n2 - 1.0));
                    }
                std::printf("basis cache %s: N=%d, max |norm^2 - 1| = %.3e\n", bc_check.c_str(), b.N(), dev);
            } else {
                throw std::invalid_argument("basis-cache: need --out or --check");
            }
        }
    } catch (const NonConvergence& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
    return kExitOk;
}
