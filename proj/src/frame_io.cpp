#include "radpoly/frame_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace radpoly {

using nlohmann::json;

ParseError::ParseError(const std::string& where, std::size_t line, const std::string& msg)
    : std::runtime_error(where + ":" + std::to_string(line) + ": " + msg), line_(line) {}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) {
        if (tok[0] == '#') break;  // trailing comment
        out.push_back(tok);
    }
    return out;
}

double parse_double(const std::string& tok, const std::string& where, std::size_t line_no) {
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
        throw ParseError(where, line_no, "expected a number, got '" + tok + "'");
    return v;
}

long parse_int(const std::string& tok, const std::string& where, std::size_t line_no) {
    long v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
        throw ParseError(where, line_no, "expected an integer, got '" + tok + "'");
    return v;
}

}  // namespace

std::vector<FrameRecord> parse_frames(std::istream& in, const std::string& where) {
    std::vector<FrameRecord> frames;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto tok = tokenize(line);
        if (tok.empty()) continue;
        if (tok[0] == "frame") {
            if (tok.size() != 2 && tok.size() != 6)
                throw ParseError(where, line_no, "frame takes <t> or <t> pose <x> <y> <heading>");
            FrameRecord rec;
            rec.timestamp = parse_double(tok[1], where, line_no);
            if (tok.size() == 6) {
                if (tok[2] != "pose")
                    throw ParseError(where, line_no, "expected 'pose', got '" + tok[2] + "'");
                rec.pose = Pose{parse_double(tok[3], where, line_no),
                                parse_double(tok[4], where, line_no),
                                parse_double(tok[5], where, line_no)};
            }
            frames.push_back(std::move(rec));
        } else if (tok[0] == "point") {
            if (frames.empty())
                throw ParseError(where, line_no, "point before any frame directive");
            if (tok.size() != 6 && tok.size() != 7)
                throw ParseError(where, line_no,
                                 "point takes <x> <y> <z> <doppler> <snr> [db|lin]");
            RadarPoint p;
            p.x = parse_double(tok[1], where, line_no);
            p.y = parse_double(tok[2], where, line_no);
            p.z = parse_double(tok[3], where, line_no);
            p.doppler = parse_double(tok[4], where, line_no);
            p.snr = parse_double(tok[5], where, line_no);
            if (tok.size() == 7) {
                if (tok[6] == "db" || tok[6] == "dB") {
                    p.snr = std::pow(10.0, p.snr / 10.0);
                } else if (tok[6] != "lin") {
                    throw ParseError(where, line_no, "snr unit must be 'db' or 'lin'");
                }
            }
            if (p.snr < 0.0) throw ParseError(where, line_no, "snr must be non-negative");
            frames.back().points.push_back(p);
        } else {
            throw ParseError(where, line_no, "unknown directive '" + tok[0] + "'");
        }
    }
    return frames;
}

std::vector<FrameRecord> load_frames(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return parse_frames(in, path.string());
}

std::string format_frames(std::span<const FrameRecord> frames) {
    std::string out;
    for (const auto& f : frames) {
        out += "frame " + format_double(f.timestamp);
        if (f.pose) {
            out += " pose " + format_double(f.pose->x) + " " + format_double(f.pose->y) + " " +
                   format_double(f.pose->heading);
        }
        out += "\n";
        for (const auto& p : f.points) {
            out += "point " + format_double(p.x) + " " + format_double(p.y) + " " +
                   format_double(p.z) + " " + format_double(p.doppler) + " " +
                   format_double(p.snr) + "\n";
        }
    }
    return out;
}

void save_frames(std::span<const FrameRecord> frames, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << format_frames(frames);
}

std::vector<MaskRecord> parse_masks(std::istream& in, const std::string& where) {
    std::vector<MaskRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto tok = tokenize(line);
        if (tok.empty()) continue;
        if (tok[0] != "mask")
            throw ParseError(where, line_no, "expected 'mask' header, got '" + tok[0] + "'");
        if (tok.size() != 7)
            throw ParseError(where, line_no,
                             "mask takes <t> <origin_x> <origin_y> <resolution> <width> <height>");
        MaskRecord rec;
        rec.timestamp = parse_double(tok[1], where, line_no);
        const Vec2 origin{parse_double(tok[2], where, line_no),
                          parse_double(tok[3], where, line_no)};
        const double res = parse_double(tok[4], where, line_no);
        const long width = parse_int(tok[5], where, line_no);
        const long height = parse_int(tok[6], where, line_no);
        if (res <= 0.0 || width < 0 || height < 0)
            throw ParseError(where, line_no, "bad mask dimensions");
        rec.mask = FreeSpaceMask::make(origin, res, static_cast<int>(width),
                                       static_cast<int>(height));
        for (long iy = 0; iy < height; ++iy) {
            if (!std::getline(in, line))
                throw ParseError(where, line_no, "truncated mask block");
            ++line_no;
            if (static_cast<long>(line.size()) < width)
                throw ParseError(where, line_no, "mask row too short");
            for (long ix = 0; ix < width; ++ix) {
                const char c = line[static_cast<std::size_t>(ix)];
                if (c != '0' && c != '1')
                    throw ParseError(where, line_no, "mask rows are '0'/'1' strings");
                rec.mask.set(static_cast<int>(ix), static_cast<int>(iy), c == '1' ? 1 : 0);
            }
        }
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<MaskRecord> load_masks(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return parse_masks(in, path.string());
}

std::string format_masks(std::span<const MaskRecord> masks) {
    std::string out;
    for (const auto& m : masks) {
        out += "mask " + format_double(m.timestamp) + " " + format_double(m.mask.origin.x) +
               " " + format_double(m.mask.origin.y) + " " + format_double(m.mask.resolution) +
               " " + std::to_string(m.mask.width) + " " + std::to_string(m.mask.height) + "\n";
        for (int iy = 0; iy < m.mask.height; ++iy) {
            for (int ix = 0; ix < m.mask.width; ++ix)
                out += m.mask.at(ix, iy) ? '1' : '0';
            out += '\n';
        }
    }
    return out;
}

void save_masks(std::span<const MaskRecord> masks, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << format_masks(masks);
}

std::string polygon_to_json_line(const RadarPolygon& poly) {
    json j;
    j["t"] = poly.timestamp;
    j["origin"] = {poly.sensor_origin.x, poly.sensor_origin.y};
    j["closed"] = poly.closed_through_origin;
    j["degenerate"] = poly.degenerate();
    json verts = json::array();
    for (const auto& v : poly.vertices) {
        verts.push_back({{"x", v.position.x},
                         {"y", v.position.y},
                         {"doppler", v.doppler},
                         {"snr", v.snr},
                         {"conf", v.confidence},
                         {"virtual", v.is_virtual},
                         {"sector", v.sector},
                         {"age", v.age}});
    }
    j["vertices"] = std::move(verts);
    return j.dump();
}

RadarPolygon polygon_from_json_line(const std::string& line, const std::string& where,
                                    std::size_t line_no) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ParseError(where, line_no, std::string("bad JSON: ") + e.what());
    }
    try {
        RadarPolygon poly;
        poly.timestamp = j.at("t").get<double>();
        poly.sensor_origin = {j.at("origin").at(0).get<double>(),
                              j.at("origin").at(1).get<double>()};
        poly.closed_through_origin = j.at("closed").get<bool>();
        for (const auto& jv : j.at("vertices")) {
            PolygonVertex v;
            v.position = {jv.at("x").get<double>(), jv.at("y").get<double>()};
            v.doppler = jv.value("doppler", 0.0);
            v.snr = jv.value("snr", 0.0);
            v.confidence = jv.value("conf", 0.0);
            v.is_virtual = jv.value("virtual", false);
            v.sector = jv.value("sector", -1);
            v.age = jv.value("age", 0);
            poly.vertices.push_back(v);
        }
        return poly;
    } catch (const json::exception& e) {
        throw ParseError(where, line_no, std::string("bad polygon record: ") + e.what());
    }
}

std::vector<RadarPolygon> load_polygons(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<RadarPolygon> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        out.push_back(polygon_from_json_line(line, path.string(), line_no));
    }
    return out;
}

void save_polygons(std::span<const RadarPolygon> polys, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    for (const auto& p : polys) out << polygon_to_json_line(p) << "\n";
}

}  // namespace radpoly
