#pragma once

#include <filesystem>
#include <vector>

#include "isoflow/basis.hpp"
#include "isoflow/laplacian.hpp"
#include "isoflow/sphharm.hpp"
#include "isoflow/types.hpp"

namespace isoflow {

/// Connected over-threshold region of a raster.
struct Blob {
    Vec3 centroid = Vec3::Zero();  ///< unit vector, |omega|-weighted mean
    int sign = 0;
    double strength = 0;  ///< area-weighted integral of omega over the region
    double area = 0;
};

/// Thresholds at threshold_frac * max|omega| and finds connected components
/// with phi-periodic and pole-aware adjacency.
std::vector<Blob> detect_blobs(const FieldRaster& r, double threshold_frac);

struct TrackPoint {
    int frame = 0;
    double t = 0;
    Vec3 x = Vec3::Zero();
    double strength = 0;
    double area = 0;
};

struct BlobTrack {
    int id = 0;
    int sign = 0;
    std::vector<TrackPoint> points;
};

/// Greedy nearest-centroid linking with a same-sign constraint; a candidate
/// pair links when their geodesic separation is below link_radius times the
/// frame gap. Unmatched blobs start new tracks.
std::vector<BlobTrack> link_tracks(const std::vector<std::vector<Blob>>& frames, const std::vector<double>& times,
                                   double link_radius = 0.5);

struct AxisFit {
    Vec3 axis = Vec3::UnitZ();
    double rms_residual = 0;  ///< radians
};

/// Least-squares rotation axis: minimizes the variance of the polar angles
/// of each track about the axis. Throws DegenerateConfiguration when the
/// points do not determine an axis (e.g. a single stationary blob).
AxisFit fit_rotation_axis(const std::vector<BlobTrack>& tracks);

/// Number of persistent coherent blobs over the last window_frames frames:
/// tracks present in every window frame with median |strength| at least
/// strength_floor times the largest. Returns 2, 3 or 4, or 0 for "other".
int classify_final_state(const std::vector<BlobTrack>& tracks, int total_frames, int window_frames,
                         double strength_floor = 0.1);

/// Stream function Psi = Delta^{-1}(W - F) as spectral coefficients.
SpectralCoeffs stream_function(const CMatrix& W, const LaplacianOperator& L, const QuantBasis& basis,
                               const CMatrix& F, int l_max);

// raster file I/O ("ZSR1": u32 n_phi, u32 n_theta, f64 t, then values)
void save_raster(const FieldRaster& r, const std::filesystem::path& file);
FieldRaster load_raster(const std::filesystem::path& file);

/// 8-bit grayscale PGM of a raster, linearly mapped over [min, max].
void save_pgm(const FieldRaster& r, const std::filesystem::path& file);

}  // namespace isoflow
