#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "isoflow/integrators.hpp"
#include "isoflow/types.hpp"

namespace isoflow {

inline constexpr const char* kVersion = "isoflow 0.1.0";

// checkpoint file ("ZSW1": u32 N, u64 step, f64 h, then N^2 complex128 row-major)
struct Checkpoint {
    int N = 0;
    std::int64_t step = 0;
    double h = 0;
    CMatrix W;
};

void save_checkpoint(const Checkpoint& c, const std::filesystem::path& file);
Checkpoint load_checkpoint(const std::filesystem::path& file);

/// Diagnostics CSV with round-trip-exact decimals.
class DiagnosticsWriter {
  public:
    explicit DiagnosticsWriter(const std::filesystem::path& file);
    void write(std::int64_t step, const Diagnostics& d);

  private:
    std::ofstream os_;
};

std::string format17(double v);

/// FNV-1a 64-bit hash of a file's bytes, as fixed-width hex.
std::string fnv1a_hex(const std::filesystem::path& file);

}  // namespace isoflow
