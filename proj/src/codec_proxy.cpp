#include "pcrd/codec_proxy.hpp"

#include "pcrd/errors.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace pcrd {

namespace {

// 53-bit uniform in [0, 1)
double uniform01(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

// entropy-coded size in bits of one symbol stream, counts from sorted runs
double stream_bits(std::vector<std::int64_t> symbols) {
    if (symbols.empty()) return 0;
    std::sort(symbols.begin(), symbols.end());
    const double n = double(symbols.size());
    double bits = 0;
    for (std::size_t i = 0; i < symbols.size();) {
        std::size_t j = i;
        while (j < symbols.size() && symbols[j] == symbols[i]) ++j;
        const double p = double(j - i) / n;
        bits -= double(j - i) * std::log2(p);
        i = j;
    }
    return bits;
}

}  // namespace

double quantizer_step(int q) { return std::max(std::exp2((q - 4) / 6.0), 1.0); }

EncodeResult encode_decode(const PointCloud& cloud, int q_g, int q_c,
                           const ProxyCodecConfig& config) {
    const double s_g = quantizer_step(q_g);
    const double s_c = quantizer_step(q_c);
    const std::size_t n = cloud.size();

    struct Snapped {
        std::array<std::int64_t, 3> key;
        std::size_t index;
    };
    std::vector<Snapped> snapped(n);
    std::optional<std::mt19937_64> rng;
    if (config.rng_seed) rng.emplace(*config.rng_seed);
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector3d& p = cloud.points[i].position;
        for (int axis = 0; axis < 3; ++axis) {
            const double u = rng ? (uniform01(*rng) - 0.5) * s_g : 0.0;
            snapped[i].key[axis] = std::llround((p[axis] + u) / s_g);
        }
        snapped[i].index = i;
    }
    std::sort(snapped.begin(), snapped.end(), [](const Snapped& a, const Snapped& b) {
        if (a.key != b.key) return a.key < b.key;
        return a.index < b.index;
    });

    EncodeResult out;
    std::array<std::vector<std::int64_t>, 3> geometry_symbols, color_symbols;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        Eigen::Vector3d color_sum = Eigen::Vector3d::Zero();
        while (j < n && snapped[j].key == snapped[i].key) {
            color_sum += cloud.points[snapped[j].index].color;
            ++j;
        }
        const Eigen::Vector3d mean = color_sum / double(j - i);

        Point p;
        for (int axis = 0; axis < 3; ++axis) {
            geometry_symbols[axis].push_back(snapped[i].key[axis]);
            p.position[axis] = double(snapped[i].key[axis]) * s_g;
        }
        for (int ch = 0; ch < 3; ++ch) {
            const std::int64_t symbol = std::llround(mean[ch] / s_c);
            color_symbols[ch].push_back(symbol);
            p.color[ch] = std::clamp(double(symbol) * s_c, 0.0, 255.0);
        }
        out.decoded.points.push_back(p);
        i = j;
    }
    out.decoded.label = cloud.label;

    double geometry_entropy = 0, color_entropy = 0;
    for (int k = 0; k < 3; ++k) {
        geometry_entropy += stream_bits(std::move(geometry_symbols[k]));
        color_entropy += stream_bits(std::move(color_symbols[k]));
    }
    out.geometry_bits = std::llround(geometry_entropy);
    out.color_bits = std::llround(color_entropy);
    out.bits = out.geometry_bits + out.color_bits;
    return out;
}

std::vector<Measurement> preencode_sweep(const PointCloud& cloud, const ProxyCodecConfig& config,
                                         const MetricsConfig& metrics) {
    if (cloud.size() == 0) throw InternalError("preencode_sweep: empty cloud");
    const double bits_to_mbps = config.frame_rate / 1e6;
    std::vector<Measurement> out;
    for (const auto& [q_g, q_c] : preencode_schedule()) {
        const EncodeResult enc = encode_decode(cloud, q_g, q_c, config);
        const DistortionReport report = full_report(cloud, enc.decoded, metrics);
        Measurement m;
        m.q_g = q_g;
        m.q_c = q_c;
        m.D = report.D;
        m.R = double(enc.bits) * bits_to_mbps;
        m.R_g = double(enc.geometry_bits) * bits_to_mbps;
        m.R_c = double(enc.color_bits) * bits_to_mbps;
        out.push_back(m);
    }
    return out;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r' && ch != ' ' && ch != '\t') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& field, int row, const char* name) {
    double v = 0;
    const auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || p != field.data() + field.size())
        throw ParseError("measurement csv row " + std::to_string(row) + ": field " + name +
                         " is not a number: '" + field + "'");
    return v;
}

int parse_qp(const std::string& field, int row, const char* name) {
    int v = 0;
    const auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || p != field.data() + field.size())
        throw ParseError("measurement csv row " + std::to_string(row) + ": field " + name +
                         " is not an integer: '" + field + "'");
    if (v < 2 || v > 51)
        throw ParseError("measurement csv row " + std::to_string(row) + ": field " + name +
                         " out of range [2, 51]: " + field);
    return v;
}

}  // namespace

std::vector<Measurement> ingest_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open measurement csv: " + path);

    std::string line;
    if (!std::getline(in, line)) throw ParseError("measurement csv is empty: " + path);
    const auto header = split_fields(line);
    const std::vector<std::string> base{"q_g", "q_c", "D", "R"};
    const std::vector<std::string> with_split{"q_g", "q_c", "D", "R", "R_g", "R_c"};
    bool split;
    if (header == base)
        split = false;
    else if (header == with_split)
        split = true;
    else
        throw ParseError("measurement csv header must be q_g,q_c,D,R or q_g,q_c,D,R,R_g,R_c, got '" +
                         line + "'");

    std::vector<Measurement> out;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_fields(line);
        if (fields.size() != (split ? 6u : 4u))
            throw ParseError("measurement csv row " + std::to_string(row) + ": expected " +
                             std::to_string(split ? 6 : 4) + " fields, got " +
                             std::to_string(fields.size()));
        Measurement m;
        m.q_g = parse_qp(fields[0], row, "q_g");
        m.q_c = parse_qp(fields[1], row, "q_c");
        m.D = parse_double(fields[2], row, "D");
        m.R = parse_double(fields[3], row, "R");
        if (m.D < 0)
            throw ParseError("measurement csv row " + std::to_string(row) +
                             ": field D must be non-negative");
        if (!(m.R > 0))
            throw ParseError("measurement csv row " + std::to_string(row) +
                             ": field R must be positive");
        if (split) {
            m.R_g = parse_double(fields[4], row, "R_g");
            m.R_c = parse_double(fields[5], row, "R_c");
            if (*m.R_g < 0)
                throw ParseError("measurement csv row " + std::to_string(row) +
                                 ": field R_g must be non-negative");
            if (*m.R_c < 0)
                throw ParseError("measurement csv row " + std::to_string(row) +
                                 ": field R_c must be non-negative");
        }
        out.push_back(m);
    }
    return out;
}

std::string measurements_to_csv(const std::vector<Measurement>& measurements) {
    const bool split = !measurements.empty() &&
                       std::all_of(measurements.begin(), measurements.end(),
                                   [](const Measurement& m) { return m.R_g && m.R_c; });
    std::string text = split ? "q_g,q_c,D,R,R_g,R_c\n" : "q_g,q_c,D,R\n";
    char buf[512];
    for (const auto& m : measurements) {
        if (split)
            std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g,%.17g\n", m.q_g, m.q_c, m.D,
                          m.R, *m.R_g, *m.R_c);
        else
            std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g\n", m.q_g, m.q_c, m.D, m.R);
        text += buf;
    }
    return text;
}

void write_csv(const std::string& path, const std::vector<Measurement>& measurements) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open for writing: " + path);
    out << measurements_to_csv(measurements);
    if (!out) throw ParseError("write failed: " + path);
}

}  // namespace pcrd
