#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace pcrd {

struct Point {
    Eigen::Vector3d position;  // voxel coordinates, finite
    Eigen::Vector3d color;     // YUV on the 8-bit scale, each in [0, 255]
};

struct PointCloud {
    std::vector<Point> points;
    // Unit length when present, same count as points. Normals are computed,
    // never read from disk.
    std::optional<std::vector<Eigen::Vector3d>> normals;
    std::string label;

    std::size_t size() const { return points.size(); }
};

// Full-range BT.709 on the [0,255] scale:
//   Y = 0.2126 R + 0.7152 G + 0.0722 B
//   U = (B - Y) / 1.8556 + 127.5
//   V = (R - Y) / 1.5748 + 127.5
// Inputs are clamped to [0,255]; the chroma offset keeps outputs in range.
Eigen::Vector3d rgb_to_yuv(double r, double g, double b);

// Exact algebraic inverse of rgb_to_yuv, no clamping or rounding.
Eigen::Vector3d yuv_to_rgb(double y, double u, double v);

struct WeightedAttributes {
    double g_bar;  // (x + y + z) / 3
    double c_bar;  // (6 Y + U + V) / 8
};

WeightedAttributes weighted_attributes(const Point& p);

}  // namespace pcrd
