#pragma once

#include "pcrd/pointcloud.hpp"

#include <filesystem>

namespace pcrd {

enum class PlyFormat { ascii, binary_little_endian };

// Vertex-only PLY. Positions are x,y,z as float or double (widened to double
// on load). Colors are either red,green,blue (accepting r,g,b) as uchar,
// converted through rgb_to_yuv, or Y,U,V as uchar/float/double taken as-is.
// Unknown scalar properties are skipped. Parse diagnostics name the header
// line or the body byte offset that broke.
PointCloud load_ply(const std::filesystem::path& path);

// Writes positions as double and colors as uchar Y,U,V (rounded to the 8-bit
// grid). Loading the result restores positions bit-exactly and colors within
// 0.5 per channel.
void save_ply(const PointCloud& cloud, const std::filesystem::path& path, PlyFormat format);

}  // namespace pcrd
