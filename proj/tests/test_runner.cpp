#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "isoflow/runner.hpp"
#include "test_helpers.hpp"

using namespace isoflow;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::vector<std::string> read_lines(const fs::path& f) {
    std::ifstream is(f);
    REQUIRE(bool(is));
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(is, line)) lines.push_back(line);
    return lines;
}

std::string slurp(const fs::path& f) {
    std::ifstream is(f, std::ios::binary);
    REQUIRE(bool(is));
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config text round trip") {
    RunConfig cfg;
    cfg.n = 21;
    cfg.h = 0.05;
    cfg.steps = 77;
    cfg.integrator = "heun";
    cfg.omega_rotation = 1.5;
    cfg.ic = "rh_wave";
    cfg.rh_l = 4;
    cfg.rh_amps = "3:0.5,-3:-0.5";
    cfg.seed = 99;
    cfg.out_dir = "somewhere";
    const RunConfig back = parse_config_text(cfg.to_text());
    CHECK(back.n == cfg.n);
    CHECK(back.h == cfg.h);
    CHECK(back.steps == cfg.steps);
    CHECK(back.integrator == cfg.integrator);
    CHECK(back.omega_rotation == cfg.omega_rotation);
    CHECK(back.ic == cfg.ic);
    CHECK(back.rh_l == cfg.rh_l);
    CHECK(back.rh_amps == cfg.rh_amps);
    CHECK(back.seed == cfg.seed);
    CHECK(back.out_dir == cfg.out_dir);
}

TEST_CASE("config parsing errors") {
    CHECK_THROWS_AS(parse_config_text("nonsense_key = 3\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("n 33\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("n = abc\n"), std::invalid_argument);
    const RunConfig c = parse_config_text("# comment only\n\nn = 9 # trailing\n");
    CHECK(c.n == 9);
    RunConfig bad;
    bad.integrator = "rk4";
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("rh amplitude parsing") {
    RunConfig cfg;
    cfg.rh_amps = "4:7.73, -4:7.73, 2:0.1:0.25";
    const RHWaveSpec s = cfg.rh_spec();
    CHECK(s.amplitudes.at(4) == cplx(7.73, 0));
    CHECK(s.amplitudes.at(-4) == cplx(7.73, 0));
    CHECK(s.amplitudes.at(2) == cplx(0.1, 0.25));
    cfg.rh_amps = "oops";
    CHECK_THROWS_AS(cfg.rh_spec(), std::invalid_argument);
}

TEST_CASE("checkpoint round trip is bit exact") {
    const fs::path f = fs::temp_directory_path() / "isoflow_ckpt_test.zsw";
    Checkpoint c;
    c.N = 7;
    c.step = 1234567;
    c.h = 0.125;
    c.W = isoflow::test::random_su(7, 3);
    save_checkpoint(c, f);
    const Checkpoint r = load_checkpoint(f);
    CHECK(r.N == 7);
    CHECK(r.step == 1234567);
    CHECK(r.h == 0.125);
    CHECK((r.W - c.W).cwiseAbs().maxCoeff() == 0.0);
    fs::remove(f);
}

TEST_CASE("minimal run writes the expected artifacts") {
    const fs::path dir = fresh_dir("isoflow_run_minimal");
    RunConfig cfg;
    cfg.n = 15;
    cfg.steps = 100;
    cfg.integrator = "heun";
    cfg.d_every = 1;
    cfg.e_every = 50;
    cfg.out_dir = dir.string();
    const RunOutcome out = run_simulation(cfg);
    CHECK(out.final_step == 100);

    const auto lines = read_lines(dir / "diagnostics.csv");
    CHECK(lines.size() == 102);  // header + 101 rows
    CHECK(lines[0] == "step,t,H,C2,C3,C4,Lx,Ly,Lz,gamma");
    const auto eigs = read_lines(dir / "eigs.csv");
    CHECK(eigs.size() == 4);  // header + snapshots at 0, 50, 100
    CHECK(eigs[0].rfind("step,lam_0,", 0) == 0);
    CHECK(fs::exists(dir / "checkpoints" / "final.zsw"));
    CHECK(fs::exists(dir / "config.cfg"));
    CHECK(fs::exists(dir / "manifest.json"));

    // manifest checksums match the files on disk
    const std::string man = slurp(dir / "manifest.json");
    CHECK(man.find("diagnostics.csv") != std::string::npos);
    CHECK(man.find(fnv1a_hex(dir / "diagnostics.csv")) != std::string::npos);
}

TEST_CASE("zero-step run emits only the initial outputs") {
    const fs::path dir = fresh_dir("isoflow_run_zero");
    RunConfig cfg;
    cfg.n = 9;
    cfg.steps = 0;
    cfg.integrator = "heun";
    cfg.f_every = 5;
    cfg.grid_phi = 16;
    cfg.grid_theta = 8;
    cfg.e_every = 0;
    cfg.out_dir = dir.string();
    run_simulation(cfg);
    CHECK(read_lines(dir / "diagnostics.csv").size() == 2);
    int frames = 0;
    for (const auto& e : fs::directory_iterator(dir / "frames"))
        if (e.path().extension() == ".zsr") ++frames;
    CHECK(frames == 1);
}

TEST_CASE("identical config and seed give byte-identical diagnostics") {
    const fs::path d1 = fresh_dir("isoflow_det_a"), d2 = fresh_dir("isoflow_det_b");
    RunConfig cfg;
    cfg.n = 13;
    cfg.steps = 50;
    cfg.integrator = "heun";
    cfg.seed = 2024;
    cfg.d_every = 5;
    cfg.e_every = 0;
    cfg.out_dir = d1.string();
    run_simulation(cfg);
    cfg.out_dir = d2.string();
    run_simulation(cfg);
    CHECK(slurp(d1 / "diagnostics.csv") == slurp(d2 / "diagnostics.csv"));
}

TEST_CASE("split Heun run restarts bit exactly") {
    const fs::path full = fresh_dir("isoflow_split_full"), half = fresh_dir("isoflow_split_half");
    RunConfig cfg;
    cfg.n = 13;
    cfg.steps = 200;
    cfg.integrator = "heun";
    cfg.seed = 7;
    cfg.d_every = 50;
    cfg.e_every = 0;
    cfg.out_dir = full.string();
    run_simulation(cfg);

    cfg.steps = 100;
    cfg.out_dir = half.string();
    run_simulation(cfg);
    cfg.steps = 200;
    RunConfig cont = cfg;
    cont.out_dir = (half / "cont").string();
    run_simulation(cont, half / "checkpoints" / "final.zsw");

    const std::string a = slurp(full / "checkpoints" / "final.zsw");
    const std::string b = slurp(half / "cont" / "checkpoints" / "final.zsw");
    CHECK(a == b);
}

TEST_CASE("split IsoMP run stays within ten tolerances") {
    const fs::path full = fresh_dir("isoflow_isplit_full"), half = fresh_dir("isoflow_isplit_half");
    RunConfig cfg;
    cfg.n = 11;
    cfg.steps = 60;
    cfg.integrator = "isomp";
    cfg.seed = 5;
    cfg.d_every = 10;
    cfg.e_every = 0;
    cfg.out_dir = full.string();
    run_simulation(cfg);

    cfg.steps = 30;
    cfg.out_dir = half.string();
    run_simulation(cfg);
    cfg.steps = 60;
    RunConfig cont = cfg;
    cont.out_dir = (half / "cont").string();
    run_simulation(cont, half / "checkpoints" / "final.zsw");

    const Checkpoint a = load_checkpoint(full / "checkpoints" / "final.zsw");
    const Checkpoint b = load_checkpoint(half / "cont" / "checkpoints" / "final.zsw");
    CHECK((a.W - b.W).cwiseAbs().maxCoeff() <= 10.0 * cfg.tol);
}

TEST_CASE("resume validation") {
    const fs::path dir = fresh_dir("isoflow_resume_bad");
    RunConfig cfg;
    cfg.n = 9;
    cfg.steps = 10;
    cfg.integrator = "heun";
    cfg.e_every = 0;
    cfg.out_dir = dir.string();
    run_simulation(cfg);
    RunConfig other = cfg;
    other.n = 11;
    other.out_dir = (dir / "x").string();
    CHECK_THROWS_AS(run_simulation(other, dir / "checkpoints" / "final.zsw"), std::invalid_argument);
}

TEST_CASE("regime thresholds") {
    CHECK(regime_from_gamma(0.05) == 4);
    CHECK(regime_from_gamma(0.25) == 3);
    CHECK(regime_from_gamma(0.55) == 2);
}

TEST_CASE("small sweep produces a summary with conserved gamma") {
    const fs::path dir = fresh_dir("isoflow_sweep");
    RunConfig cfg;
    cfg.n = 13;
    cfg.steps = 40;
    cfg.integrator = "isomp";
    cfg.seed = 100;
    cfg.d_every = 10;
    cfg.e_every = 0;
    cfg.grid_phi = 32;
    cfg.grid_theta = 16;
    cfg.out_dir = dir.string();
    const auto rows = run_sweep(cfg, 2, 2);
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
        CHECK(r.error.empty());
        CHECK(r.gamma_drift <= 1e-8);
        CHECK(r.regime == regime_from_gamma(r.gamma));
    }
    CHECK(rows[0].seed == 100);
    CHECK(rows[1].seed == 101);
    CHECK(fs::exists(dir / "sweep_summary.csv"));
    CHECK(fs::exists(dir / "run_000" / "diagnostics.csv"));

    // re-analysis of the sweep directory reproduces the regime table
    AnalyzeOptions aopt;
    aopt.scatter = false;
    const auto cls = analyze_sweep(dir, aopt);
    REQUIRE(cls.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(cls[i].regime == rows[i].regime);
        CHECK(cls[i].gamma == doctest::Approx(rows[i].gamma).epsilon(1e-12));
    }
    CHECK(fs::exists(dir / "regime_table.csv"));
}

TEST_CASE("analyze produces tracks, classification and scatter") {
    const fs::path dir = fresh_dir("isoflow_analyze");
    // short blob run so frames contain real structure
    const fs::path blobfile = dir / "blobs.csv";
    {
        std::ofstream os(blobfile);
        os << "width = 20\n";
        os << "0.0,1.0,1.0\n3.14159,2.14159,-1.0\n";
    }
    RunConfig cfg;
    cfg.n = 21;
    cfg.steps = 30;
    cfg.integrator = "heun";
    cfg.ic = "gauss_blobs";
    cfg.ic_file = blobfile.string();
    cfg.f_every = 5;
    cfg.d_every = 10;
    cfg.e_every = 0;
    cfg.grid_phi = 96;
    cfg.grid_theta = 48;
    cfg.out_dir = (dir / "run").string();
    run_simulation(cfg);

    AnalyzeOptions opt;
    const AnalyzeReport rep = analyze_run(dir / "run", opt);
    CHECK(rep.frames == 7);
    CHECK(rep.blobs == 2);
    CHECK(fs::exists(dir / "run" / "tracks.csv"));
    CHECK(fs::exists(dir / "run" / "classification.txt"));
    CHECK(fs::exists(dir / "run" / "scatter.csv"));
    const auto scatter = read_lines(dir / "run" / "scatter.csv");
    CHECK(scatter.size() >= 2);
    CHECK(scatter[0] == "psi,omega");
}

TEST_CASE("point vortex runner writes trajectories and invariants") {
    const fs::path dir = fresh_dir("isoflow_pv");
    const fs::path data = dir / "pv.csv";
    {
        std::ofstream os(data);
        os << "2.3218,1.3017,1\n-0.9638,1.8837,0.9002\n-2.5283,1.577,-0.5436\n0.8511,1.5896,-0.4178\n";
    }
    PVRunOptions opt;
    opt.h = 0.01;
    opt.steps = 200;
    opt.d_every = 20;
    run_point_vortex(data, dir / "out", opt);
    const auto traj = read_lines(dir / "out" / "trajectory.csv");
    CHECK(traj.size() == 12);  // header + 11 rows
    const auto inv = read_lines(dir / "out" / "invariants.csv");
    CHECK(inv.size() == 12);
    CHECK(inv[0] == "t,H,Lx,Ly,Lz");
}

#ifdef ISOFLOW_CLI_PATH
TEST_CASE("CLI exit codes and smoke run") {
    const std::string cli = ISOFLOW_CLI_PATH;
    const fs::path dir = fresh_dir("isoflow_cli_smoke");

    CHECK(std::system((cli + " --help > /dev/null 2>&1").c_str()) == 0);

    // usage error -> 2
    int rc = std::system((cli + " simulate --config /nonexistent.cfg > /dev/null 2>&1").c_str());
    CHECK(WEXITSTATUS(rc) == 2);
    rc = std::system((cli + " analyze > /dev/null 2>&1").c_str());
    CHECK(WEXITSTATUS(rc) == 2);

    // minimal simulate -> 0
    const std::string cmd = cli + " simulate --n 9 --steps 5 --integrator heun --e-every 0 --out-dir " +
                            (dir / "run").string() + " > /dev/null 2>&1";
    rc = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(rc) == 0);
    CHECK(fs::exists(dir / "run" / "diagnostics.csv"));

    // basis cache write + check
    rc = std::system((cli + " basis-cache --n 9 --out " + (dir / "b.zsb").string() + " > /dev/null 2>&1").c_str());
    CHECK(WEXITSTATUS(rc) == 0);
    rc = std::system((cli + " basis-cache --check " + (dir / "b.zsb").string() + " > /dev/null 2>&1").c_str());
    CHECK(WEXITSTATUS(rc) == 0);

    // numerical failure -> 3, with the last state checkpointed
    const std::string blowup = cli + " simulate --n 9 --steps 5 --integrator isomp --h 1000 --max-iters 5" +
                               " --e-every 0 --out-dir " + (dir / "blowup").string() + " > /dev/null 2>&1";
    rc = std::system(blowup.c_str());
    CHECK(WEXITSTATUS(rc) == 3);
    CHECK(fs::exists(dir / "blowup" / "checkpoints" / "final.zsw"));
}
#endif
