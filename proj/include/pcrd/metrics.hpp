#pragma once

#include "pcrd/neighbor_index.hpp"
#include "pcrd/pointcloud.hpp"

#include <Eigen/Core>

#include <vector>

namespace pcrd {

struct MetricsConfig {
    int normals_k = 12;  // neighborhood size for plane fitting
};

// Every distortion for one (a, b) cloud pair. Bidirectional values are the
// max of the two one-sided directions; d_c weights the per-channel maxima
// 6:1:1. The unified D consumes d_g (never d_p) together with d_c through
// the inverse pooled attribute covariance.
struct DistortionReport {
    double d_g = 0;
    double d_p = 0;
    double d_cY = 0, d_cU = 0, d_cV = 0;
    double d_c = 0;
    double D = 0;
    double pc_psnr = 0;
    // one-sided precursors: "a_to_b" measures a's points against b
    double d_g_a_to_b = 0, d_g_b_to_a = 0;
    double d_c_a_to_b = 0, d_c_b_to_a = 0;
};

struct PooledCovariance {
    Eigen::Matrix2d s = Eigen::Matrix2d::Zero();  // over (g_bar, c_bar), regularized
    std::size_t n_a = 0, n_b = 0;
};

struct ColorDistortion {
    double d_cY = 0, d_cU = 0, d_cV = 0;
    double d_c = 0;
};

// Mean squared distance from each test point to its nearest indexed point.
double one_sided_point_to_point(const PointCloud& test, const NeighborIndex& ref_index);
double point_to_point(const PointCloud& a, const PointCloud& b);

// Per-channel squared color error over nearest-reference correspondences.
Eigen::Vector3d one_sided_color(const PointCloud& test, const PointCloud& ref,
                                const NeighborIndex& ref_index);
ColorDistortion color_distortion(const PointCloud& a, const PointCloud& b);

// Plane fit over the k nearest neighbors of each point; the normal is the
// eigenvector of the smallest covariance eigenvalue, sign fixed so the
// largest-magnitude component is positive. Fully degenerate neighborhoods
// fall back to (0,0,1). k is clamped to the cloud size.
std::vector<Eigen::Vector3d> estimate_normals(const PointCloud& cloud, int k);

double one_sided_point_to_plane(const PointCloud& test, const PointCloud& ref,
                                const std::vector<Eigen::Vector3d>& ref_normals,
                                const NeighborIndex& ref_index);
double point_to_plane(const PointCloud& a, const PointCloud& b, const MetricsConfig& config = {});

// Population covariance of the per-point (g_bar, c_bar) attribute pairs.
Eigen::Matrix2d attribute_covariance(const PointCloud& cloud);

// Count-weighted pool of the two attribute covariances, then regularized by
// adding 1e-9 * max(1, trace) to the diagonal so constant-attribute clouds
// stay invertible.
PooledCovariance pooled_covariance(const PointCloud& a, const PointCloud& b);

// sqrt([d_g d_c] S^-1 [d_g d_c]^T), the Mahalanobis-style combination.
double unified_distortion(double d_g, double d_c, const PooledCovariance& s);

// 10 log10(4 / D). D of zero maps to +infinity; negative D refuses.
double pc_psnr(double D);

DistortionReport full_report(const PointCloud& a, const PointCloud& b,
                             const MetricsConfig& config = {});

}  // namespace pcrd
