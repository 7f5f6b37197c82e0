#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "radpoly/geometry.hpp"

namespace radpoly {

// Parse failure with file/line context in what().
class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& where, std::size_t line, const std::string& msg);
    std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

struct FrameRecord {
    double timestamp = 0.0;
    std::optional<Pose> pose;
    std::vector<RadarPoint> points;
};

// Text frame streams. Grammar (one directive per line, '#' comments):
//   frame <t> [pose <x> <y> <heading>]
//   point <x> <y> <z> <doppler> <snr> [db|lin]
// SNR tagged "db" is converted to linear on load; files are saved in linear
// units, shortest round-trip decimal, so load(save(x)) == x bit for bit.
std::vector<FrameRecord> parse_frames(std::istream& in, const std::string& where);
std::vector<FrameRecord> load_frames(const std::filesystem::path& path);
std::string format_frames(std::span<const FrameRecord> frames);
void save_frames(std::span<const FrameRecord> frames, const std::filesystem::path& path);

// Binary-ish text masks, one block per mask:
//   mask <t> <origin_x> <origin_y> <resolution> <width> <height>
//   <height> rows of <width> '0'/'1' characters, row 0 = lowest y
struct MaskRecord {
    double timestamp = 0.0;
    FreeSpaceMask mask;
};

std::vector<MaskRecord> parse_masks(std::istream& in, const std::string& where);
std::vector<MaskRecord> load_masks(const std::filesystem::path& path);
std::string format_masks(std::span<const MaskRecord> masks);
void save_masks(std::span<const MaskRecord> masks, const std::filesystem::path& path);

// Polygon streams: one JSON object per line.
std::string polygon_to_json_line(const RadarPolygon& poly);
RadarPolygon polygon_from_json_line(const std::string& line, const std::string& where,
                                    std::size_t line_no);
std::vector<RadarPolygon> load_polygons(const std::filesystem::path& path);
void save_polygons(std::span<const RadarPolygon> polys, const std::filesystem::path& path);

// Shortest decimal that round-trips the exact double (std::to_chars).
std::string format_double(double v);

}  // namespace radpoly
