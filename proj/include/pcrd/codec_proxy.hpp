#pragma once

#include "pcrd/metrics.hpp"
#include "pcrd/pointcloud.hpp"
#include "pcrd/rdmodel.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pcrd {

struct ProxyCodecConfig {
    double frame_rate = 30.0;  // frames/s for bit-rate normalization
    // When set, a uniform non-subtractive dither in [-0.5, 0.5) geometry
    // steps is added per coordinate before snapping. Colors are never
    // dithered. Same seed, same cloud, same QPs => bit-identical output.
    std::optional<std::uint64_t> rng_seed;
};

// Quantizer step for QP q, floored at one unit so integer-grid positions
// and 8-bit colors survive the lowest QPs untouched.
double quantizer_step(int q);

struct EncodeResult {
    PointCloud decoded;
    std::int64_t bits = 0;  // geometry_bits + color_bits
    std::int64_t geometry_bits = 0;
    std::int64_t color_bits = 0;
};

// Quantize-merge-entropy stand-in codec. Positions snap to the geometry
// step grid, coincident points merge with averaged color, merged colors
// snap to the color step grid and clamp to [0, 255]. The bit count is the
// first-order entropy of the per-axis cell indices plus the per-channel
// color symbols, each coordinate treated independently.
EncodeResult encode_decode(const PointCloud& cloud, int q_g, int q_c,
                           const ProxyCodecConfig& config = {});

// Runs encode_decode over the nine-pair schedule and measures each decode
// against the original. R (and the R_g/R_c split) convert bit counts to
// Mbps via frame_rate.
std::vector<Measurement> preencode_sweep(const PointCloud& cloud,
                                         const ProxyCodecConfig& config = {},
                                         const MetricsConfig& metrics = {});

// Measurement CSV: header q_g,q_c,D,R with optional R_g,R_c columns. The
// split columns are written only when every row carries them. Doubles are
// printed with 17 significant digits.
std::vector<Measurement> ingest_csv(const std::string& path);
std::string measurements_to_csv(const std::vector<Measurement>& measurements);
void write_csv(const std::string& path, const std::vector<Measurement>& measurements);

}  // namespace pcrd
