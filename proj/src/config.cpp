#include "isoflow/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace isoflow {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return (a == std::string::npos) ? std::string() : s.substr(a, b - a + 1);
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void RunConfig::validate() const {
    if (n < 2) throw std::invalid_argument("config: n must be >= 2");
    if (h <= 0) throw std::invalid_argument("config: h must be > 0");
    if (steps < 0) throw std::invalid_argument("config: steps must be >= 0");
    if (integrator != "isomp" && integrator != "heun")
        throw std::invalid_argument("config: integrator must be isomp or heun");
    if (tol <= 0) throw std::invalid_argument("config: tol must be > 0");
    if (max_iters < 1) throw std::invalid_argument("config: max_iters must be >= 1");
    if (ic != "random_l2" && ic != "random_l2_zero_momentum" && ic != "gauss_blobs" && ic != "rh_wave")
        throw std::invalid_argument("config: unknown ic '" + ic + "'");
    if (ic == "gauss_blobs" && ic_file.empty()) throw std::invalid_argument("config: gauss_blobs needs ic_file");
    if (ic == "rh_wave" && (rh_l < 1 || rh_l > n - 1)) throw std::invalid_argument("config: rh_l out of range");
    if (d_every < 1) throw std::invalid_argument("config: d_every must be >= 1");
    if (f_every < 0 || c_every < 0 || e_every < 0) throw std::invalid_argument("config: cadences must be >= 0");
    if (grid_phi < 4 || grid_theta < 4) throw std::invalid_argument("config: grid must be at least 4x4");
    if (ic_eps <= 0) throw std::invalid_argument("config: ic_eps must be > 0");
}

RHWaveSpec RunConfig::rh_spec() const {
    RHWaveSpec spec;
    spec.C = rh_c;
    spec.Omega = omega_rotation;
    spec.l = rh_l;
    spec.zonal = rh_zonal;
    std::stringstream ss(rh_amps);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        std::stringstream ts(tok);
        std::string ms, res, ims;
        std::getline(ts, ms, ':');
        std::getline(ts, res, ':');
        std::getline(ts, ims, ':');
        if (ms.empty() || res.empty()) throw std::invalid_argument("config: bad rh_amps token '" + tok + "'");
        const int m = std::stoi(ms);
        const double re = std::stod(res);
        const double im = ims.empty() ? 0.0 : std::stod(ims);
        spec.amplitudes[m] = cplx(re, im);
    }
    return spec;
}

std::string RunConfig::to_text() const {
    std::ostringstream os;
    os << "n = " << n << "\n";
    os << "h = " << fmt17(h) << "\n";
    os << "steps = " << steps << "\n";
    os << "integrator = " << integrator << "\n";
    os << "tol = " << fmt17(tol) << "\n";
    os << "max_iters = " << max_iters << "\n";
    os << "omega_rotation = " << fmt17(omega_rotation) << "\n";
    os << "ic = " << ic << "\n";
    os << "seed = " << seed << "\n";
    os << "ic_eps = " << fmt17(ic_eps) << "\n";
    if (!ic_file.empty()) os << "ic_file = " << ic_file << "\n";
    if (ic == "rh_wave") {
        os << "rh_c = " << fmt17(rh_c) << "\n";
        os << "rh_l = " << rh_l << "\n";
        if (!rh_amps.empty()) os << "rh_amps = " << rh_amps << "\n";
        os << "rh_zonal = " << fmt17(rh_zonal) << "\n";
    }
    os << "d_every = " << d_every << "\n";
    os << "f_every = " << f_every << "\n";
    os << "c_every = " << c_every << "\n";
    os << "e_every = " << e_every << "\n";
    os << "out_dir = " << out_dir << "\n";
    os << "grid_phi = " << grid_phi << "\n";
    os << "grid_theta = " << grid_theta << "\n";
    return os.str();
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        try {
            if (key == "n") cfg.n = std::stoi(val);
            else if (key == "h") cfg.h = std::stod(val);
            else if (key == "steps") cfg.steps = std::stoll(val);
            else if (key == "integrator") cfg.integrator = val;
            else if (key == "tol") cfg.tol = std::stod(val);
            else if (key == "max_iters") cfg.max_iters = std::stoi(val);
            else if (key == "omega_rotation") cfg.omega_rotation = std::stod(val);
            else if (key == "ic") cfg.ic = val;
            else if (key == "seed") cfg.seed = std::stoull(val);
            else if (key == "ic_eps") cfg.ic_eps = std::stod(val);
            else if (key == "ic_file") cfg.ic_file = val;
            else if (key == "rh_c") cfg.rh_c = std::stod(val);
            else if (key == "rh_l") cfg.rh_l = std::stoi(val);
            else if (key == "rh_amps") cfg.rh_amps = val;
            else if (key == "rh_zonal") cfg.rh_zonal = std::stod(val);
            else if (key == "d_every") cfg.d_every = std::stoll(val);
            else if (key == "f_every") cfg.f_every = std::stoll(val);
            else if (key == "c_every") cfg.c_every = std::stoll(val);
            else if (key == "e_every") cfg.e_every = std::stoll(val);
            else if (key == "out_dir") cfg.out_dir = val;
            else if (key == "grid_phi") cfg.grid_phi = std::stoi(val);
            else if (key == "grid_theta") cfg.grid_theta = std::stoi(val);
            else throw std::invalid_argument("unknown key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw;
        } catch (const std::exception&) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": bad value for " + key);
        }
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& file) {
    std::ifstream is(file);
    if (!is) throw std::invalid_argument("cannot open config: " + file.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config_text(ss.str());
}

}  // namespace isoflow
