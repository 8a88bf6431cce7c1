#include "pcrd/pointcloud.hpp"

#include <algorithm>

namespace pcrd {

namespace {

double clamp255(double v) { return std::clamp(v, 0.0, 255.0); }

}  // namespace

Eigen::Vector3d rgb_to_yuv(double r, double g, double b) {
    r = clamp255(r);
    g = clamp255(g);
    b = clamp255(b);
    const double y = 0.2126 * r + 0.7152 * g + 0.0722 * b;
    const double u = (b - y) / 1.8556 + 127.5;
    const double v = (r - y) / 1.5748 + 127.5;
    return {y, u, v};
}

Eigen::Vector3d yuv_to_rgb(double y, double u, double v) {
    const double b = (u - 127.5) * 1.8556 + y;
    const double r = (v - 127.5) * 1.5748 + y;
    const double g = (y - 0.2126 * r - 0.0722 * b) / 0.7152;
    return {r, g, b};
}

WeightedAttributes weighted_attributes(const Point& p) {
    return {
        (p.position.x() + p.position.y() + p.position.z()) / 3.0,
        (6.0 * p.color.x() + p.color.y() + p.color.z()) / 8.0,
    };
}

}  // namespace pcrd
