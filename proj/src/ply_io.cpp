#include "pcrd/ply_io.hpp"

#include "pcrd/errors.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

static_assert(std::endian::native == std::endian::little,
              "binary PLY reader assumes a little-endian host");

namespace pcrd {

namespace {

enum class Scalar { f32, f64, u8, skip1, skip2, skip4, skip8 };

std::size_t scalar_size(Scalar s) {
    switch (s) {
        case Scalar::u8:
        case Scalar::skip1: return 1;
        case Scalar::skip2: return 2;
        case Scalar::f32:
        case Scalar::skip4: return 4;
        case Scalar::f64:
        case Scalar::skip8: return 8;
    }
    return 0;
}

struct Property {
    Scalar type;
    std::string name;
};

// Column roles resolved from property names.
enum class Role { px, py, pz, cr, cg, cb, cy, cu, cv, ignore };

struct Header {
    bool binary = false;
    std::size_t vertex_count = 0;
    std::vector<Property> properties;
    std::vector<Role> roles;
    bool rgb = false;  // colors arrive as RGB and need conversion
    std::size_t body_offset = 0;
};

[[noreturn]] void fail(const std::string& what) { throw ParseError("ply: " + what); }

Scalar parse_scalar(const std::string& t, int line) {
    if (t == "float" || t == "float32") return Scalar::f32;
    if (t == "double" || t == "float64") return Scalar::f64;
    if (t == "uchar" || t == "uint8") return Scalar::u8;
    if (t == "char" || t == "int8") return Scalar::skip1;
    if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return Scalar::skip2;
    if (t == "int" || t == "uint" || t == "int32" || t == "uint32") return Scalar::skip4;
    fail("unsupported property type '" + t + "' (header line " + std::to_string(line) + ")");
}

Header parse_header(const std::string& data) {
    Header h;
    std::size_t pos = 0;
    int line_no = 0;
    bool in_vertex = false;
    bool seen_vertex = false;
    bool ended = false;

    while (pos < data.size()) {
        std::size_t eol = data.find('\n', pos);
        if (eol == std::string::npos) break;
        std::string line = data.substr(pos, eol - pos);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        pos = eol + 1;
        ++line_no;

        std::istringstream ss(line);
        std::string word;
        ss >> word;

        if (line_no == 1) {
            if (word != "ply") fail("missing 'ply' magic (header line 1)");
            continue;
        }
        if (word == "comment" || word == "obj_info" || word.empty()) continue;
        if (word == "format") {
            std::string fmt, ver;
            ss >> fmt >> ver;
            if (fmt == "ascii") h.binary = false;
            else if (fmt == "binary_little_endian") h.binary = true;
            else fail("unsupported format '" + fmt + "' (header line " + std::to_string(line_no) + ")");
            continue;
        }
        if (word == "element") {
            std::string name;
            std::size_t count = 0;
            ss >> name >> count;
            if (name == "vertex") {
                if (seen_vertex) fail("duplicate vertex element (header line " + std::to_string(line_no) + ")");
                seen_vertex = true;
                in_vertex = true;
                h.vertex_count = count;
            } else {
                if (!seen_vertex)
                    fail("element '" + name + "' precedes vertex data (header line " +
                         std::to_string(line_no) + ")");
                in_vertex = false;  // trailing elements are ignored
            }
            continue;
        }
        if (word == "property") {
            if (!in_vertex) continue;
            std::string type;
            ss >> type;
            if (type == "list")
                fail("unsupported property type 'list' (header line " + std::to_string(line_no) + ")");
            std::string name;
            ss >> name;
            if (name.empty()) fail("property without a name (header line " + std::to_string(line_no) + ")");
            h.properties.push_back({parse_scalar(type, line_no), name});
            continue;
        }
        if (word == "end_header") {
            ended = true;
            h.body_offset = pos;
            break;
        }
        fail("unrecognized header line " + std::to_string(line_no) + ": '" + line + "'");
    }
    if (!ended) fail("header never reaches end_header");
    if (!seen_vertex) fail("no vertex element declared");

    bool has[9] = {};
    h.roles.reserve(h.properties.size());
    for (const auto& p : h.properties) {
        Role r = Role::ignore;
        if (p.name == "x") r = Role::px;
        else if (p.name == "y") r = Role::py;
        else if (p.name == "z") r = Role::pz;
        else if (p.name == "red" || p.name == "r") r = Role::cr;
        else if (p.name == "green" || p.name == "g") r = Role::cg;
        else if (p.name == "blue" || p.name == "b") r = Role::cb;
        else if (p.name == "Y") r = Role::cy;
        else if (p.name == "U") r = Role::cu;
        else if (p.name == "V") r = Role::cv;
        if (r != Role::ignore) {
            if (has[static_cast<int>(r)]) fail("duplicate property '" + p.name + "'");
            has[static_cast<int>(r)] = true;
            const bool is_pos = r == Role::px || r == Role::py || r == Role::pz;
            const bool is_rgb = r == Role::cr || r == Role::cg || r == Role::cb;
            if (is_pos && p.type != Scalar::f32 && p.type != Scalar::f64)
                fail("position property '" + p.name + "' must be float or double");
            if (is_rgb && p.type != Scalar::u8)
                fail("color property '" + p.name + "' must be uchar");
            if (!is_pos && !is_rgb && p.type != Scalar::u8 && p.type != Scalar::f32 &&
                p.type != Scalar::f64)
                fail("color property '" + p.name + "' must be uchar, float, or double");
        }
        h.roles.push_back(r);
    }
    for (Role r : {Role::px, Role::py, Role::pz})
        if (!has[static_cast<int>(r)])
            fail("missing position property (need x, y, z)");
    const bool rgb = has[static_cast<int>(Role::cr)] && has[static_cast<int>(Role::cg)] &&
                     has[static_cast<int>(Role::cb)];
    const bool yuv = has[static_cast<int>(Role::cy)] && has[static_cast<int>(Role::cu)] &&
                     has[static_cast<int>(Role::cv)];
    if (!rgb && !yuv) fail("missing color properties (need red,green,blue or Y,U,V)");
    if (rgb && yuv) fail("both RGB and YUV color properties declared");
    h.rgb = rgb;
    return h;
}

struct RawVertex {
    double v[9] = {};  // indexed by Role

    void assign(Role r, double value) {
        if (r != Role::ignore) v[static_cast<int>(r)] = value;
    }
};

Point finish_vertex(const Header& h, const RawVertex& raw, std::size_t index) {
    Point p;
    p.position = {raw.v[0], raw.v[1], raw.v[2]};
    if (!p.position.allFinite())
        fail("vertex " + std::to_string(index) + ": non-finite position");
    if (h.rgb) {
        p.color = rgb_to_yuv(raw.v[3], raw.v[4], raw.v[5]);
    } else {
        p.color = {std::clamp(raw.v[6], 0.0, 255.0), std::clamp(raw.v[7], 0.0, 255.0),
                   std::clamp(raw.v[8], 0.0, 255.0)};
    }
    return p;
}

std::vector<Point> read_ascii_body(const Header& h, const std::string& data) {
    std::vector<Point> points;
    points.reserve(h.vertex_count);
    const char* cur = data.data() + h.body_offset;
    const char* end = data.data() + data.size();
    int line_no = 1;  // counted past end_header
    auto skip_space = [&] {
        while (cur < end && (*cur == ' ' || *cur == '\t' || *cur == '\r' || *cur == '\n')) {
            if (*cur == '\n') ++line_no;
            ++cur;
        }
    };
    for (std::size_t i = 0; i < h.vertex_count; ++i) {
        RawVertex raw;
        for (std::size_t f = 0; f < h.properties.size(); ++f) {
            skip_space();
            if (cur >= end)
                fail("truncated body: expected " + std::to_string(h.vertex_count) +
                     " vertices, input ends inside vertex " + std::to_string(i));
            const char* tok = cur;
            while (cur < end && *cur != ' ' && *cur != '\t' && *cur != '\r' && *cur != '\n') ++cur;
            double value = 0;
            auto res = std::from_chars(tok, cur, value);
            if (res.ec != std::errc() || res.ptr != cur)
                fail("vertex " + std::to_string(i) + " property '" + h.properties[f].name +
                     "': bad numeric token '" + std::string(tok, cur) + "' (body line " +
                     std::to_string(line_no) + ")");
            raw.assign(h.roles[f], value);
        }
        points.push_back(finish_vertex(h, raw, i));
    }
    return points;
}

std::vector<Point> read_binary_body(const Header& h, const std::string& data) {
    std::size_t record = 0;
    for (const auto& p : h.properties) record += scalar_size(p.type);
    const std::size_t need = h.vertex_count * record;
    const std::size_t have = data.size() - h.body_offset;
    if (have < need)
        fail("truncated body: need " + std::to_string(need) + " bytes for " +
             std::to_string(h.vertex_count) + " vertices, file ends at byte offset " +
             std::to_string(data.size()));

    std::vector<Point> points;
    points.reserve(h.vertex_count);
    const char* cur = data.data() + h.body_offset;
    for (std::size_t i = 0; i < h.vertex_count; ++i) {
        RawVertex raw;
        for (std::size_t f = 0; f < h.properties.size(); ++f) {
            double value = 0;
            switch (h.properties[f].type) {
                case Scalar::f32: {
                    float x;
                    std::memcpy(&x, cur, 4);
                    value = x;
                    break;
                }
                case Scalar::f64: {
                    std::memcpy(&value, cur, 8);
                    break;
                }
                case Scalar::u8: {
                    value = static_cast<unsigned char>(*cur);
                    break;
                }
                default: break;  // skipped payload
            }
            raw.assign(h.roles[f], value);
            cur += scalar_size(h.properties[f].type);
        }
        points.push_back(finish_vertex(h, raw, i));
    }
    return points;
}

unsigned char quantize_channel(double v) {
    return static_cast<unsigned char>(std::llround(std::clamp(v, 0.0, 255.0)));
}

}  // namespace

PointCloud load_ply(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("ply: cannot open '" + path.string() + "'");
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    Header h = parse_header(data);
    PointCloud cloud;
    cloud.label = path.stem().string();
    cloud.points = h.binary ? read_binary_body(h, data) : read_ascii_body(h, data);
    return cloud;
}

void save_ply(const PointCloud& cloud, const std::filesystem::path& path, PlyFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("ply: cannot open '" + path.string() + "' for writing");

    out << "ply\n"
        << (format == PlyFormat::ascii ? "format ascii 1.0\n" : "format binary_little_endian 1.0\n")
        << "element vertex " << cloud.size() << "\n"
        << "property double x\nproperty double y\nproperty double z\n"
        << "property uchar Y\nproperty uchar U\nproperty uchar V\n"
        << "end_header\n";

    if (format == PlyFormat::ascii) {
        char buf[128];
        for (const auto& p : cloud.points) {
            for (int k = 0; k < 3; ++k) {
                std::snprintf(buf, sizeof buf, "%.17g ", p.position[k]);
                out << buf;
            }
            out << int(quantize_channel(p.color.x())) << ' ' << int(quantize_channel(p.color.y()))
                << ' ' << int(quantize_channel(p.color.z())) << '\n';
        }
    } else {
        for (const auto& p : cloud.points) {
            char rec[27];
            std::memcpy(rec, p.position.data(), 24);
            rec[24] = static_cast<char>(quantize_channel(p.color.x()));
            rec[25] = static_cast<char>(quantize_channel(p.color.y()));
            rec[26] = static_cast<char>(quantize_channel(p.color.z()));
            out.write(rec, sizeof rec);
        }
    }
    if (!out) throw ParseError("ply: write failed for '" + path.string() + "'");
}

}  // namespace pcrd
