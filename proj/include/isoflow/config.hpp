#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "isoflow/initial_conditions.hpp"

namespace isoflow {

/// Run configuration; file format is UTF-8 "key = value" lines, '#' comments.
struct RunConfig {
    int n = 33;
    double h = 0.1;
    std::int64_t steps = 1000;
    std::string integrator = "isomp";  // isomp | heun
    double tol = 1e-13;
    int max_iters = 50;
    double omega_rotation = 0.0;

    std::string ic = "random_l2";  // random_l2 | random_l2_zero_momentum | gauss_blobs | rh_wave
    std::uint64_t seed = 0;
    double ic_eps = 0.01;
    std::string ic_file;   // gauss_blobs CSV
    double rh_c = 1.0;
    int rh_l = 5;
    std::string rh_amps;   // "m:re[:im]," list, e.g. "4:7.73,-4:7.73"
    double rh_zonal = 0.0;

    std::int64_t d_every = 10;
    std::int64_t f_every = 0;
    std::int64_t c_every = 0;
    std::int64_t e_every = 1000;
    std::string out_dir = "out";
    int grid_phi = 128;
    int grid_theta = 64;

    void validate() const;  // throws std::invalid_argument on bad values
    std::string to_text() const;
    RHWaveSpec rh_spec() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::filesystem::path& file);

}  // namespace isoflow
