#include "isoflow/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace isoflow {

namespace fs = std::filesystem;

namespace {

SpectralCoeffs make_initial_coeffs(const RunConfig& cfg) {
    if (cfg.ic == "random_l2") return sample_l2_random({cfg.seed, cfg.ic_eps, cfg.n - 1});
    if (cfg.ic == "random_l2_zero_momentum")
        return zero_momentum_projection(sample_l2_random({cfg.seed, cfg.ic_eps, cfg.n - 1}));
    if (cfg.ic == "gauss_blobs") return gaussian_blobs(load_blob_csv(cfg.ic_file), cfg.n);
    throw std::invalid_argument("unknown ic: " + cfg.ic);
}

std::string frame_name(std::int64_t step) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "frame_%08" PRId64 ".zsr", step);
    return buf;
}

std::string ckpt_name(std::int64_t step) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "ckpt_%08" PRId64 ".zsw", step);
    return buf;
}

}  // namespace

int regime_from_gamma(double gamma) { return gamma < 0.15 ? 4 : (gamma < 0.4 ? 3 : 2); }

RunOutcome run_simulation(const RunConfig& cfg, const std::optional<fs::path>& resume) {
    cfg.validate();
    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    if (cfg.f_every > 0) fs::create_directories(dir / "frames");
    fs::create_directories(dir / "checkpoints");

    {
        std::ofstream os(dir / "config.cfg");
        os << cfg.to_text();
    }

    const QuantBasis basis = QuantBasis::build(cfg.n);
    const LaplacianOperator lap = LaplacianOperator::build(cfg.n);

    SimState s;
    s.F = coriolis_matrix(cfg.omega_rotation, basis);
    s.h = cfg.h;

    // the IC also determines the real-time scale on resume
    CMatrix W0;
    if (cfg.ic == "rh_wave")
        W0 = rh_wave(cfg.rh_spec(), basis, 0.0);
    else
        W0 = coeffs_to_matrix(make_initial_coeffs(cfg), basis);
    const double norm_W0 = W0.norm();
    s.seconds_per_step = time_scale(cfg.n, cfg.h, norm_W0);

    if (resume) {
        const Checkpoint c = load_checkpoint(*resume);
        if (c.N != cfg.n) throw std::invalid_argument("resume: checkpoint N does not match config");
        if (c.h != cfg.h) throw std::invalid_argument("resume: checkpoint h does not match config");
        if (c.step > cfg.steps) throw std::invalid_argument("resume: checkpoint is past the requested steps");
        s.W = c.W;
        s.step = c.step;
    } else {
        s.W = W0;
        s.step = 0;
    }

    DiagnosticsWriter diag(dir / "diagnostics.csv");
    std::ofstream eigs;
    if (cfg.e_every > 0) {
        eigs.open(dir / "eigs.csv");
        eigs << "step";
        for (int i = 0; i < cfg.n; ++i) eigs << ",lam_" << i;
        eigs << "\n";
    }

    const StepperOptions opt{cfg.tol, cfg.max_iters};
    const bool isomp = (cfg.integrator == "isomp");

    auto emit = [&]() {
        const std::int64_t k = s.step;
        const bool last = (k == cfg.steps);
        if (k % cfg.d_every == 0 || last)
            diag.write(k, compute_diagnostics(s.W, s.F, lap, basis, double(k) * s.seconds_per_step));
        if (cfg.f_every > 0 && (k % cfg.f_every == 0 || last)) {
            FieldRaster r = synthesize_raster(matrix_to_coeffs(s.W, basis, cfg.n - 1), cfg.grid_phi, cfg.grid_theta);
            r.t = double(k) * s.seconds_per_step;
            save_raster(r, dir / "frames" / frame_name(k));
        }
        if (cfg.c_every > 0 && (k % cfg.c_every == 0 || last))
            save_checkpoint({cfg.n, k, cfg.h, s.W}, dir / "checkpoints" / ckpt_name(k));
        if (cfg.e_every > 0 && (k % cfg.e_every == 0 || last)) {
            eigs << k;
            for (double v : spectrum_imag_sorted(s.W)) eigs << ',' << format17(v);
            eigs << "\n";
            eigs.flush();
        }
    };

    emit();
    try {
        while (s.step < cfg.steps) {
            if (isomp)
                isomp_step(s, lap, opt);
            else
                heun_step(s, lap);
            emit();
        }
    } catch (...) {
        save_checkpoint({cfg.n, s.step, cfg.h, s.W}, dir / "checkpoints" / "final.zsw");
        throw;
    }
    save_checkpoint({cfg.n, s.step, cfg.h, s.W}, dir / "checkpoints" / "final.zsw");

    // manifest: config snapshot + inventory with checksums
    nlohmann::json man;
    man["version"] = kVersion;
    man["seed"] = cfg.seed;
    man["seconds_per_step"] = s.seconds_per_step;
    man["norm_W0"] = norm_W0;
    man["config"] = cfg.to_text();
    man["files"] = nlohmann::json::array();
    for (auto it = fs::recursive_directory_iterator(dir); it != fs::recursive_directory_iterator(); ++it) {
        if (!it->is_regular_file() || it->path().filename() == "manifest.json") continue;
        nlohmann::json f;
        f["path"] = fs::relative(it->path(), dir).generic_string();
        f["bytes"] = std::uint64_t(it->file_size());
        f["fnv1a64"] = fnv1a_hex(it->path());
        man["files"].push_back(std::move(f));
    }
    {
        std::ofstream os(dir / "manifest.json");
        os << man.dump(2) << "\n";
    }

    return {dir, s.step, s.seconds_per_step, norm_W0};
}

namespace {

struct GammaStats {
    double gamma0 = 0, drift = 0;
};

GammaStats gamma_from_diagnostics(const fs::path& csv) {
    std::ifstream is(csv);
    if (!is) throw std::runtime_error("cannot open " + csv.string());
    std::string line;
    std::getline(is, line);  // header
    GammaStats g;
    bool first = true;
    while (std::getline(is, line)) {
        const auto pos = line.rfind(',');
        if (pos == std::string::npos) continue;
        const double gamma = std::stod(line.substr(pos + 1));
        if (first) {
            g.gamma0 = gamma;
            first = false;
        }
        g.drift = std::max(g.drift, std::abs(gamma - g.gamma0));
    }
    if (first) throw std::runtime_error("empty diagnostics: " + csv.string());
    return g;
}

}  // namespace

std::vector<SweepRow> run_sweep(const RunConfig& base, int count, int jobs) {
    if (count < 1) throw std::invalid_argument("sweep: count must be >= 1");
    base.validate();
    const fs::path dir(base.out_dir);
    fs::create_directories(dir);

    std::vector<SweepRow> rows(count);
    std::atomic<int> next{0};
    std::mutex log_mutex;

    auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= count) return;
            SweepRow& row = rows[i];
            row.run = i;
            row.seed = base.seed + std::uint64_t(i);
            char sub[32];
            std::snprintf(sub, sizeof sub, "run_%03d", i);
            RunConfig cfg = base;
            cfg.seed = row.seed;
            cfg.out_dir = (dir / sub).string();
            if (cfg.f_every <= 0) cfg.f_every = std::max<std::int64_t>(1, cfg.steps / 60);
            try {
                run_simulation(cfg);
                const GammaStats g = gamma_from_diagnostics(fs::path(cfg.out_dir) / "diagnostics.csv");
                row.gamma = g.gamma0;
                row.gamma_drift = g.drift;
                row.regime = regime_from_gamma(row.gamma);
                AnalyzeOptions aopt;
                aopt.scatter = false;
                row.blobs = analyze_run(cfg.out_dir, aopt).blobs;
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            std::lock_guard<std::mutex> lock(log_mutex);
            std::ofstream log(dir / "sweep.log", std::ios::app);
            log << sub << ": " << (row.error.empty() ? "ok" : row.error) << "\n";
        }
    };

    if (jobs < 1) jobs = int(std::max(1u, std::thread::hardware_concurrency()));
    jobs = std::min(jobs, count);
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::ofstream os(dir / "sweep_summary.csv");
    os << "run,seed,gamma,gamma_drift,blobs,regime,error\n";
    for (const SweepRow& r : rows)
        os << r.run << ',' << r.seed << ',' << format17(r.gamma) << ',' << format17(r.gamma_drift) << ',' << r.blobs
           << ',' << r.regime << ',' << r.error << "\n";
    return rows;
}

AnalyzeReport analyze_run(const fs::path& run_dir, const AnalyzeOptions& opt) {
    AnalyzeReport rep;
    std::vector<fs::path> frame_files;
    if (fs::is_directory(run_dir / "frames"))
        for (const auto& e : fs::directory_iterator(run_dir / "frames"))
            if (e.path().extension() == ".zsr") frame_files.push_back(e.path());
    std::sort(frame_files.begin(), frame_files.end());

    std::vector<std::vector<Blob>> per_frame;
    std::vector<double> times;
    for (const fs::path& f : frame_files) {
        const FieldRaster r = load_raster(f);
        per_frame.push_back(detect_blobs(r, opt.threshold));
        times.push_back(r.t);
        if (opt.pgm) save_pgm(r, fs::path(f).replace_extension(".pgm"));
    }
    rep.frames = int(per_frame.size());

    std::vector<BlobTrack> tracks;
    if (rep.frames > 0) {
        tracks = link_tracks(per_frame, times, opt.link_radius);
        rep.tracks = int(tracks.size());
        std::ofstream os(run_dir / "tracks.csv");
        os << "track_id,frame,t,x,y,z,sign,strength\n";
        for (const BlobTrack& tr : tracks)
            for (const TrackPoint& p : tr.points)
                os << tr.id << ',' << p.frame << ',' << format17(p.t) << ',' << format17(p.x.x()) << ','
                   << format17(p.x.y()) << ',' << format17(p.x.z()) << ',' << tr.sign << ',' << format17(p.strength)
                   << "\n";

        try {
            const AxisFit fit = fit_rotation_axis(tracks);
            rep.axis_ok = true;
            rep.axis = fit.axis;
            rep.axis_residual = fit.rms_residual;
            std::ofstream ax(run_dir / "axis.txt");
            ax << "axis = " << format17(fit.axis.x()) << " " << format17(fit.axis.y()) << " "
               << format17(fit.axis.z()) << "\n";
            ax << "rms_residual_rad = " << format17(fit.rms_residual) << "\n";
        } catch (const DegenerateConfiguration&) {
            rep.axis_ok = false;
        }

        const int window = std::min(rep.frames, std::max(10, int(opt.window_frac * rep.frames + 0.5)));
        rep.blobs = classify_final_state(tracks, rep.frames, window);
        std::ofstream cl(run_dir / "classification.txt");
        cl << "blobs = " << rep.blobs << "\n";
        cl << "window_frames = " << window << "\n";
    }

    if (opt.scatter && fs::exists(run_dir / "checkpoints" / "final.zsw")) {
        const Checkpoint c = load_checkpoint(run_dir / "checkpoints" / "final.zsw");
        const RunConfig cfg = load_config(run_dir / "config.cfg");
        const QuantBasis basis = QuantBasis::build(c.N);
        const LaplacianOperator lap = LaplacianOperator::build(c.N);
        const CMatrix F = coriolis_matrix(cfg.omega_rotation, basis);
        const SpectralCoeffs wc = matrix_to_coeffs(c.W, basis, c.N - 1);
        const SpectralCoeffs pc = stream_function(c.W, lap, basis, F, c.N - 1);
        const FieldRaster wr = synthesize_raster(wc, cfg.grid_phi, cfg.grid_theta);
        const FieldRaster pr = synthesize_raster(pc, cfg.grid_phi, cfg.grid_theta);
        const std::size_t total = wr.vals.size();
        const std::size_t stride = std::max<std::size_t>(1, (total + 99999) / 100000);
        std::ofstream os(run_dir / "scatter.csv");
        os << "psi,omega\n";
        for (std::size_t k = 0; k < total; k += stride)
            os << format17(pr.vals[k]) << ',' << format17(wr.vals[k]) << "\n";
    }
    return rep;
}

std::vector<SweepClassRow> analyze_sweep(const fs::path& sweep_dir, const AnalyzeOptions& opt) {
    std::vector<fs::path> runs;
    for (const auto& e : fs::directory_iterator(sweep_dir))
        if (e.is_directory() && e.path().filename().string().rfind("run_", 0) == 0) runs.push_back(e.path());
    std::sort(runs.begin(), runs.end());
    if (runs.empty()) throw std::invalid_argument("analyze: no run_* subdirectories in " + sweep_dir.string());

    std::vector<SweepClassRow> rows;
    for (const fs::path& r : runs) {
        SweepClassRow row;
        row.run = r.filename().string();
        row.gamma = gamma_from_diagnostics(r / "diagnostics.csv").gamma0;
        row.blobs = analyze_run(r, opt).blobs;
        row.regime = regime_from_gamma(row.gamma);
        rows.push_back(std::move(row));
    }
    std::ofstream os(sweep_dir / "regime_table.csv");
    os << "run,gamma,blobs,regime\n";
    for (const SweepClassRow& r : rows)
        os << r.run << ',' << format17(r.gamma) << ',' << r.blobs << ',' << r.regime << "\n";
    return rows;
}

void run_point_vortex(const fs::path& data, const fs::path& out_dir, const PVRunOptions& opt) {
    const BlobSpec spec = load_blob_csv(data);
    PointVortexState s;
    s.x = spec.centers;
    s.gamma = spec.strengths;
    if (opt.solve_strengths) s.gamma = strengths_from_positions(s.x);

    fs::create_directories(out_dir);
    std::ofstream traj(out_dir / "trajectory.csv");
    std::ofstream inv(out_dir / "invariants.csv");
    traj << "t";
    for (std::size_t i = 0; i < s.size(); ++i) traj << ",x" << i << ",y" << i << ",z" << i;
    traj << "\n";
    inv << "t,H,Lx,Ly,Lz\n";

    auto emit = [&](std::int64_t k) {
        const double t = double(k) * opt.h;
        traj << format17(t);
        for (const Vec3& x : s.x) traj << ',' << format17(x.x()) << ',' << format17(x.y()) << ',' << format17(x.z());
        traj << "\n";
        const PVInvariants iv = pv_invariants(s);
        inv << format17(t) << ',' << format17(iv.H) << ',' << format17(iv.L.x()) << ',' << format17(iv.L.y()) << ','
            << format17(iv.L.z()) << "\n";
    };

    emit(0);
    for (std::int64_t k = 1; k <= opt.steps; ++k) {
        pv_step(s, opt.h);
        if (k % opt.d_every == 0 || k == opt.steps) emit(k);
    }
}

}  // namespace isoflow
