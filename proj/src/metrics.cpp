#include "pcrd/metrics.hpp"

#include "pcrd/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace pcrd {

namespace {

// Compensated accumulation keeps MSE sums deterministic and order-robust.
class KahanSum {
public:
    void add(double v) {
        const double y = v - c_;
        const double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

private:
    double s_ = 0, c_ = 0;
};

void require_nonempty(const PointCloud& c, const char* who) {
    if (c.size() == 0) throw InternalError(std::string(who) + ": empty cloud");
}

}  // namespace

double one_sided_point_to_point(const PointCloud& test, const NeighborIndex& ref_index) {
    require_nonempty(test, "point_to_point");
    KahanSum acc;
    for (const auto& p : test.points) acc.add(ref_index.nearest(p.position).squared_distance);
    return acc.value() / static_cast<double>(test.size());
}

double point_to_point(const PointCloud& a, const PointCloud& b) {
    const auto ia = NeighborIndex::build(a);
    const auto ib = NeighborIndex::build(b);
    return std::max(one_sided_point_to_point(a, ib), one_sided_point_to_point(b, ia));
}

Eigen::Vector3d one_sided_color(const PointCloud& test, const PointCloud& ref,
                                const NeighborIndex& ref_index) {
    require_nonempty(test, "color_distortion");
    KahanSum acc[3];
    for (const auto& p : test.points) {
        const auto hit = ref_index.nearest(p.position);
        const Eigen::Vector3d diff = p.color - ref.points[hit.index].color;
        for (int k = 0; k < 3; ++k) acc[k].add(diff[k] * diff[k]);
    }
    const double n = static_cast<double>(test.size());
    return {acc[0].value() / n, acc[1].value() / n, acc[2].value() / n};
}

ColorDistortion color_distortion(const PointCloud& a, const PointCloud& b) {
    const auto ia = NeighborIndex::build(a);
    const auto ib = NeighborIndex::build(b);
    const Eigen::Vector3d ab = one_sided_color(a, b, ib);
    const Eigen::Vector3d ba = one_sided_color(b, a, ia);
    ColorDistortion d;
    d.d_cY = std::max(ab.x(), ba.x());
    d.d_cU = std::max(ab.y(), ba.y());
    d.d_cV = std::max(ab.z(), ba.z());
    d.d_c = (6.0 * d.d_cY + d.d_cU + d.d_cV) / 8.0;
    return d;
}

std::vector<Eigen::Vector3d> estimate_normals(const PointCloud& cloud, int k) {
    require_nonempty(cloud, "estimate_normals");
    const std::size_t n = cloud.size();
    const std::size_t kk = std::min<std::size_t>(std::max(k, 1), n);
    const auto index = NeighborIndex::build(cloud);

    std::vector<Eigen::Vector3d> normals(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto nb = index.nearest_k(cloud.points[i].position, kk);

        Eigen::Vector3d mean = Eigen::Vector3d::Zero();
        for (const auto& h : nb) mean += cloud.points[h.index].position;
        mean /= static_cast<double>(nb.size());

        Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
        for (const auto& h : nb) {
            const Eigen::Vector3d d = cloud.points[h.index].position - mean;
            cov += d * d.transpose();
        }
        cov /= static_cast<double>(nb.size());

        if (cov.cwiseAbs().maxCoeff() == 0.0) {
            normals[i] = {0, 0, 1};  // every neighbor coincides
            continue;
        }

        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
        Eigen::Vector3d nvec = eig.eigenvectors().col(0);  // smallest eigenvalue
        int dominant = 0;
        nvec.cwiseAbs().maxCoeff(&dominant);
        if (nvec[dominant] < 0) nvec = -nvec;
        normals[i] = nvec.normalized();
    }
    return normals;
}

double one_sided_point_to_plane(const PointCloud& test, const PointCloud& ref,
                                const std::vector<Eigen::Vector3d>& ref_normals,
                                const NeighborIndex& ref_index) {
    require_nonempty(test, "point_to_plane");
    if (ref_normals.size() != ref.size())
        throw InternalError("point_to_plane: normal count does not match the reference cloud");
    KahanSum acc;
    for (const auto& p : test.points) {
        const auto hit = ref_index.nearest(p.position);
        const double proj =
            (p.position - ref.points[hit.index].position).dot(ref_normals[hit.index]);
        acc.add(proj * proj);
    }
    return acc.value() / static_cast<double>(test.size());
}

double point_to_plane(const PointCloud& a, const PointCloud& b, const MetricsConfig& config) {
    const auto ia = NeighborIndex::build(a);
    const auto ib = NeighborIndex::build(b);
    const auto na = a.normals ? *a.normals : estimate_normals(a, config.normals_k);
    const auto nb = b.normals ? *b.normals : estimate_normals(b, config.normals_k);
    return std::max(one_sided_point_to_plane(a, b, nb, ib),
                    one_sided_point_to_plane(b, a, na, ia));
}

Eigen::Matrix2d attribute_covariance(const PointCloud& cloud) {
    require_nonempty(cloud, "attribute_covariance");
    const double n = static_cast<double>(cloud.size());

    KahanSum mg, mc;
    for (const auto& p : cloud.points) {
        const auto w = weighted_attributes(p);
        mg.add(w.g_bar);
        mc.add(w.c_bar);
    }
    const double mean_g = mg.value() / n;
    const double mean_c = mc.value() / n;

    KahanSum sgg, sgc, scc;
    for (const auto& p : cloud.points) {
        const auto w = weighted_attributes(p);
        const double dg = w.g_bar - mean_g;
        const double dc = w.c_bar - mean_c;
        sgg.add(dg * dg);
        sgc.add(dg * dc);
        scc.add(dc * dc);
    }
    Eigen::Matrix2d s;
    s << sgg.value() / n, sgc.value() / n, sgc.value() / n, scc.value() / n;
    return s;
}

PooledCovariance pooled_covariance(const PointCloud& a, const PointCloud& b) {
    PooledCovariance pc;
    pc.n_a = a.size();
    pc.n_b = b.size();
    const double na = static_cast<double>(pc.n_a), nb = static_cast<double>(pc.n_b);
    pc.s = (na * attribute_covariance(a) + nb * attribute_covariance(b)) / (na + nb);
    pc.s += 1e-9 * std::max(1.0, pc.s.trace()) * Eigen::Matrix2d::Identity();
    return pc;
}

double unified_distortion(double d_g, double d_c, const PooledCovariance& s) {
    const Eigen::Vector2d v{d_g, d_c};
    const Eigen::Vector2d solved = s.s.ldlt().solve(v);
    const double q = v.dot(solved);
    if (!std::isfinite(q))
        throw InternalError("unified_distortion: covariance not invertible after regularization");
    return std::sqrt(std::max(q, 0.0));
}

double pc_psnr(double D) {
    if (D < 0) throw InternalError("pc_psnr: negative distortion");
    if (D == 0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(4.0 / D);
}

DistortionReport full_report(const PointCloud& a, const PointCloud& b,
                             const MetricsConfig& config) {
    require_nonempty(a, "full_report");
    require_nonempty(b, "full_report");

    const auto ia = NeighborIndex::build(a);
    const auto ib = NeighborIndex::build(b);

    DistortionReport r;
    r.d_g_a_to_b = one_sided_point_to_point(a, ib);
    r.d_g_b_to_a = one_sided_point_to_point(b, ia);
    r.d_g = std::max(r.d_g_a_to_b, r.d_g_b_to_a);

    const auto na = a.normals ? *a.normals : estimate_normals(a, config.normals_k);
    const auto nb = b.normals ? *b.normals : estimate_normals(b, config.normals_k);
    r.d_p = std::max(one_sided_point_to_plane(a, b, nb, ib),
                     one_sided_point_to_plane(b, a, na, ia));

    const Eigen::Vector3d cab = one_sided_color(a, b, ib);
    const Eigen::Vector3d cba = one_sided_color(b, a, ia);
    r.d_cY = std::max(cab.x(), cba.x());
    r.d_cU = std::max(cab.y(), cba.y());
    r.d_cV = std::max(cab.z(), cba.z());
    r.d_c = (6.0 * r.d_cY + r.d_cU + r.d_cV) / 8.0;
    r.d_c_a_to_b = (6.0 * cab.x() + cab.y() + cab.z()) / 8.0;
    r.d_c_b_to_a = (6.0 * cba.x() + cba.y() + cba.z()) / 8.0;

    r.D = unified_distortion(r.d_g, r.d_c, pooled_covariance(a, b));
    r.pc_psnr = pc_psnr(r.D);
    return r;
}

}  // namespace pcrd
