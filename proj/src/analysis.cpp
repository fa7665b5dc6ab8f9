#include "isoflow/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>

namespace isoflow {

namespace {

constexpr double kPi = std::numbers::pi;

Vec3 unit_vector(double phi, double theta) {
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

double geodesic(const Vec3& a, const Vec3& b) {
    return std::atan2(a.cross(b).norm(), a.dot(b));
}

}  // namespace

std::vector<Blob> detect_blobs(const FieldRaster& r, double threshold_frac) {
    if (threshold_frac <= 0.0 || threshold_frac >= 1.0)
        throw std::invalid_argument("detect_blobs: threshold_frac must be in (0,1)");
    const int nt = r.n_theta, np = r.n_phi;
    double vmax = 0.0;
    for (double v : r.vals) vmax = std::max(vmax, std::abs(v));
    std::vector<Blob> blobs;
    if (vmax == 0.0) return blobs;
    const double thr = threshold_frac * vmax;

    std::vector<int> label(r.vals.size(), -1);
    auto idx = [&](int i, int j) { return std::size_t(i) * np + j; };
    std::vector<std::size_t> stack;

    for (int i0 = 0; i0 < nt; ++i0) {
        for (int j0 = 0; j0 < np; ++j0) {
            const std::size_t seed = idx(i0, j0);
            if (label[seed] >= 0 || std::abs(r.vals[seed]) < thr) continue;
            const int sign = (r.vals[seed] > 0) ? 1 : -1;
            const int id = int(blobs.size());
            Blob b;
            b.sign = sign;
            Vec3 acc = Vec3::Zero();
            double wsum = 0.0;
            stack.assign(1, seed);
            label[seed] = id;
            while (!stack.empty()) {
                const std::size_t cur = stack.back();
                stack.pop_back();
                const int i = int(cur / np), j = int(cur % np);
                const double v = r.vals[cur];
                const double cell = std::sin(r.theta(i)) * (kPi / nt) * (2.0 * kPi / np);
                b.strength += v * cell;
                b.area += cell;
                acc += std::abs(v) * cell * unit_vector(r.phi(j), r.theta(i));
                wsum += std::abs(v) * cell;

                auto visit = [&](int ii, int jj) {
                    jj = (jj % np + np) % np;
                    if (ii < 0 || ii >= nt) return;
                    const std::size_t nb = idx(ii, jj);
                    if (label[nb] >= 0) return;
                    const double u = r.vals[nb];
                    if (std::abs(u) < thr || (u > 0) != (sign > 0)) return;
                    label[nb] = id;
                    stack.push_back(nb);
                };
                visit(i, j - 1);
                visit(i, j + 1);
                visit(i - 1, j);
                visit(i + 1, j);
                // across the poles the antipodal-phi cell is the neighbour
                if (i == 0) visit(0, j + np / 2);
                if (i == nt - 1) visit(nt - 1, j + np / 2);
            }
            if (wsum > 0) b.centroid = acc.normalized();
            blobs.push_back(std::move(b));
        }
    }
    return blobs;
}

std::vector<BlobTrack> link_tracks(const std::vector<std::vector<Blob>>& frames, const std::vector<double>& times,
                                   double link_radius) {
    if (frames.size() != times.size()) throw std::invalid_argument("link_tracks: frames/times size mismatch");
    std::vector<BlobTrack> tracks;
    std::vector<int> live;  // indices of tracks eligible for linking

    int next_id = 0;
    for (std::size_t f = 0; f < frames.size(); ++f) {
        // candidate (distance, track slot, blob) triples, greedy by distance
        struct Cand {
            double d;
            int slot, blob;
        };
        std::vector<Cand> cands;
        for (std::size_t ti = 0; ti < live.size(); ++ti) {
            const BlobTrack& tr = tracks[live[ti]];
            const TrackPoint& last = tr.points.back();
            const double gap = double(int(f) - last.frame);
            for (std::size_t bi = 0; bi < frames[f].size(); ++bi) {
                if (frames[f][bi].sign != tr.sign) continue;
                const double d = geodesic(last.x, frames[f][bi].centroid);
                if (d <= link_radius * gap) cands.push_back({d, int(ti), int(bi)});
            }
        }
        std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.d < b.d; });
        std::vector<bool> slot_used(live.size(), false), blob_used(frames[f].size(), false);
        for (const Cand& c : cands) {
            if (slot_used[c.slot] || blob_used[c.blob]) continue;
            slot_used[c.slot] = true;
            blob_used[c.blob] = true;
            const Blob& b = frames[f][c.blob];
            tracks[live[c.slot]].points.push_back({int(f), times[f], b.centroid, b.strength, b.area});
        }
        for (std::size_t bi = 0; bi < frames[f].size(); ++bi) {
            if (blob_used[bi]) continue;
            const Blob& b = frames[f][bi];
            BlobTrack tr;
            tr.id = next_id++;
            tr.sign = b.sign;
            tr.points.push_back({int(f), times[f], b.centroid, b.strength, b.area});
            tracks.push_back(std::move(tr));
        }
        // rebuild live list: tracks may persist across short gaps (<= 2 frames)
        live.clear();
        for (std::size_t t = 0; t < tracks.size(); ++t)
            if (int(f) - tracks[t].points.back().frame <= 2) live.push_back(int(t));
    }
    return tracks;
}

namespace {

double axis_objective(const std::vector<BlobTrack>& tracks, const Vec3& n, std::size_t& count) {
    double J = 0.0;
    count = 0;
    for (const BlobTrack& tr : tracks) {
        if (tr.points.size() < 2) continue;
        double mean = 0.0;
        for (const TrackPoint& p : tr.points) mean += geodesic(p.x, n);
        mean /= double(tr.points.size());
        for (const TrackPoint& p : tr.points) {
            const double d = geodesic(p.x, n) - mean;
            J += d * d;
        }
        count += tr.points.size();
    }
    return J;
}

}  // namespace

AxisFit fit_rotation_axis(const std::vector<BlobTrack>& tracks) {
    std::size_t npts = 0;
    double spread = 0.0;
    std::vector<Vec3> all;
    for (const BlobTrack& tr : tracks)
        for (const TrackPoint& p : tr.points) all.push_back(p.x);
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = i + 1; j < all.size(); ++j) spread = std::max(spread, geodesic(all[i], all[j]));
    if (all.size() < 2 || spread < 1e-9)
        throw DegenerateConfiguration("fit_rotation_axis: points do not determine an axis");

    // coarse search over a Fibonacci set, then local descent on the sphere
    Vec3 best = Vec3::UnitZ();
    double bestJ = std::numeric_limits<double>::infinity();
    const int M = 400;
    for (int k = 0; k < M; ++k) {
        const double z = 1.0 - 2.0 * (k + 0.5) / M;
        const double phi = 2.0 * kPi * k * 0.6180339887498949;
        const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
        const Vec3 n(s * std::cos(phi), s * std::sin(phi), z);
        const double J = axis_objective(tracks, n, npts);
        if (J < bestJ) {
            bestJ = J;
            best = n;
        }
    }
    double step = 0.2;
    while (step > 1e-9) {
        bool improved = false;
        for (int d = 0; d < 4; ++d) {
            Vec3 t1 = best.cross(std::abs(best.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX()).normalized();
            Vec3 t2 = best.cross(t1);
            const Vec3 dir = (d == 0) ? t1 : (d == 1) ? -t1 : (d == 2) ? t2 : -t2;
            const Vec3 cand = (best + step * dir).normalized();
            const double J = axis_objective(tracks, cand, npts);
            if (J < bestJ) {
                bestJ = J;
                best = cand;
                improved = true;
            }
        }
        if (!improved) step *= 0.5;
    }
    AxisFit fit;
    fit.axis = best;
    axis_objective(tracks, best, npts);
    fit.rms_residual = std::sqrt(bestJ / double(npts));
    return fit;
}

int classify_final_state(const std::vector<BlobTrack>& tracks, int total_frames, int window_frames,
                         double strength_floor) {
    if (window_frames < 1 || window_frames > total_frames)
        throw std::invalid_argument("classify_final_state: bad window");
    const int first = total_frames - window_frames;
    std::vector<double> strengths;
    for (const BlobTrack& tr : tracks) {
        std::vector<double> vals;
        std::vector<bool> present(window_frames, false);
        for (const TrackPoint& p : tr.points) {
            if (p.frame < first) continue;
            present[p.frame - first] = true;
            vals.push_back(std::abs(p.strength));
        }
        if (std::find(present.begin(), present.end(), false) != present.end()) continue;
        std::nth_element(vals.begin(), vals.begin() + vals.size() / 2, vals.end());
        strengths.push_back(vals[vals.size() / 2]);
    }
    if (strengths.empty()) return 0;
    const double cap = *std::max_element(strengths.begin(), strengths.end());
    int count = 0;
    for (double s : strengths)
        if (s >= strength_floor * cap) ++count;
    return (count >= 2 && count <= 4) ? count : 0;
}

SpectralCoeffs stream_function(const CMatrix& W, const LaplacianOperator& L, const QuantBasis& basis,
                               const CMatrix& F, int l_max) {
    return matrix_to_coeffs(L.solve(W - F), basis, l_max);
}

namespace {

static_assert(std::endian::native == std::endian::little, "raster format assumes a little-endian host");
constexpr char kRasterMagic[4] = {'Z', 'S', 'R', '1'};

}  // namespace

void save_raster(const FieldRaster& r, const std::filesystem::path& file) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open raster for writing: " + file.string());
    os.write(kRasterMagic, 4);
    const std::uint32_t np = r.n_phi, nt = r.n_theta;
    os.write(reinterpret_cast<const char*>(&np), 4);
    os.write(reinterpret_cast<const char*>(&nt), 4);
    os.write(reinterpret_cast<const char*>(&r.t), 8);
    os.write(reinterpret_cast<const char*>(r.vals.data()), std::streamsize(r.vals.size() * sizeof(double)));
    if (!os) throw std::runtime_error("write failed: " + file.string());
}

FieldRaster load_raster(const std::filesystem::path& file) {
    std::ifstream is(file, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open raster: " + file.string());
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kRasterMagic, 4) != 0) throw std::runtime_error("bad raster magic: " + file.string());
    std::uint32_t np = 0, nt = 0;
    FieldRaster r;
    is.read(reinterpret_cast<char*>(&np), 4);
    is.read(reinterpret_cast<char*>(&nt), 4);
    is.read(reinterpret_cast<char*>(&r.t), 8);
    if (!is || np == 0 || nt == 0) throw std::runtime_error("bad raster header: " + file.string());
    r.n_phi = int(np);
    r.n_theta = int(nt);
    r.vals.resize(std::size_t(np) * nt);
    is.read(reinterpret_cast<char*>(r.vals.data()), std::streamsize(r.vals.size() * sizeof(double)));
    if (!is) throw std::runtime_error("truncated raster: " + file.string());
    return r;
}

void save_pgm(const FieldRaster& r, const std::filesystem::path& file) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open pgm for writing: " + file.string());
    double lo = r.vals.empty() ? 0.0 : r.vals[0], hi = lo;
    for (double v : r.vals) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double scale = (hi > lo) ? 255.0 / (hi - lo) : 0.0;
    os << "P5\n" << r.n_phi << " " << r.n_theta << "\n255\n";
    for (double v : r.vals) os.put(char(std::uint8_t(std::lround((v - lo) * scale))));
}

}  // namespace isoflow
