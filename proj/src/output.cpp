#include "isoflow/output.hpp"

#include <bit>
#include <cstring>

namespace isoflow {

namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint format assumes a little-endian host");
constexpr char kCkptMagic[4] = {'Z', 'S', 'W', '1'};

}  // namespace

void save_checkpoint(const Checkpoint& c, const std::filesystem::path& file) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open checkpoint for writing: " + file.string());
    os.write(kCkptMagic, 4);
    const std::uint32_t n = c.N;
    const std::uint64_t step = c.step;
    os.write(reinterpret_cast<const char*>(&n), 4);
    os.write(reinterpret_cast<const char*>(&step), 8);
    os.write(reinterpret_cast<const char*>(&c.h), 8);
    // row-major (re,im) pairs
    std::vector<double> buf(std::size_t(c.N) * c.N * 2);
    for (int i = 0; i < c.N; ++i)
        for (int j = 0; j < c.N; ++j) {
            const std::size_t k = 2 * (std::size_t(i) * c.N + j);
            buf[k] = c.W(i, j).real();
            buf[k + 1] = c.W(i, j).imag();
        }
    os.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size() * sizeof(double)));
    if (!os) throw std::runtime_error("write failed: " + file.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& file) {
    std::ifstream is(file, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open checkpoint: " + file.string());
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kCkptMagic, 4) != 0)
        throw std::runtime_error("bad checkpoint magic: " + file.string());
    std::uint32_t n = 0;
    std::uint64_t step = 0;
    Checkpoint c;
    is.read(reinterpret_cast<char*>(&n), 4);
    is.read(reinterpret_cast<char*>(&step), 8);
    is.read(reinterpret_cast<char*>(&c.h), 8);
    if (!is || n < 2) throw std::runtime_error("bad checkpoint header: " + file.string());
    c.N = int(n);
    c.step = std::int64_t(step);
    std::vector<double> buf(std::size_t(c.N) * c.N * 2);
    is.read(reinterpret_cast<char*>(buf.data()), std::streamsize(buf.size() * sizeof(double)));
    if (!is) throw std::runtime_error("truncated checkpoint: " + file.string());
    c.W.resize(c.N, c.N);
    for (int i = 0; i < c.N; ++i)
        for (int j = 0; j < c.N; ++j) {
            const std::size_t k = 2 * (std::size_t(i) * c.N + j);
            c.W(i, j) = cplx(buf[k], buf[k + 1]);
        }
    return c;
}

std::string format17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

DiagnosticsWriter::DiagnosticsWriter(const std::filesystem::path& file) : os_(file) {
    if (!os_) throw std::runtime_error("cannot open diagnostics CSV: " + file.string());
    os_ << "step,t,H,C2,C3,C4,Lx,Ly,Lz,gamma\n";
}

void DiagnosticsWriter::write(std::int64_t step, const Diagnostics& d) {
    os_ << step << ',' << format17(d.t) << ',' << format17(d.H) << ',' << format17(d.C2) << ',' << format17(d.C3)
        << ',' << format17(d.C4) << ',' << format17(d.L.x()) << ',' << format17(d.L.y()) << ',' << format17(d.L.z())
        << ',' << format17(d.gamma) << '\n';
    os_.flush();
}

std::string fnv1a_hex(const std::filesystem::path& file) {
    std::ifstream is(file, std::ios::binary);
    if (!is) throw std::runtime_error("cannot hash file: " + file.string());
    std::uint64_t h = 14695981039346656037ull;
    char buf[1 << 16];
    while (is) {
        is.read(buf, sizeof buf);
        const std::streamsize got = is.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= std::uint8_t(buf[i]);
            h *= 1099511628211ull;
        }
    }
    char out[17];
    std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
    return out;
}

}  // namespace isoflow
