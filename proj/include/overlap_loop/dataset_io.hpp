#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "overlap_loop/errors.hpp"
#include "overlap_loop/geometry.hpp"
#include "overlap_loop/point_cloud.hpp"

namespace overlap_loop {

/// Reads a binary scan: consecutive little-endian float32 records
/// (x, y, z, remission), 16 bytes per point.
inline PointCloud load_scan(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw IoError("cannot open scan: " + path);
  const std::streamoff size = in.tellg();
  if (size % 16 != 0)
    throw MalformedFileError("scan size not a multiple of 16 bytes: " + path);
  in.seekg(0);
  const std::size_t n = static_cast<std::size_t>(size) / 16;

  std::vector<float> raw(n * 4);
  if (n > 0) {
    in.read(reinterpret_cast<char*>(raw.data()),
            static_cast<std::streamsize>(raw.size() * 4));
    if (!in) throw IoError("failed reading scan: " + path);
  }

  PointCloud cloud;
  cloud.points.resize(n);
  cloud.remission.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    cloud.points[i] = Vec3(raw[4 * i + 0], raw[4 * i + 1], raw[4 * i + 2]);
    cloud.remission[i] = raw[4 * i + 3];
  }
  return cloud;
}

inline void save_scan(const std::string& path, const PointCloud& cloud) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  std::vector<float> raw(cloud.size() * 4);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    raw[4 * i + 0] = static_cast<float>(cloud.points[i].x());
    raw[4 * i + 1] = static_cast<float>(cloud.points[i].y());
    raw[4 * i + 2] = static_cast<float>(cloud.points[i].z());
    raw[4 * i + 3] = static_cast<float>(cloud.remission[i]);
  }
  out.write(reinterpret_cast<const char*>(raw.data()),
            static_cast<std::streamsize>(raw.size() * 4));
  if (!out) throw IoError("failed writing scan: " + path);
}

namespace detail {

inline std::vector<double> parse_numbers(const std::string& line) {
  std::istringstream ss(line);
  std::vector<double> vals;
  double v;
  while (ss >> v) vals.push_back(v);
  return vals;
}

inline Mat4 mat4_from_row_major_3x4(const std::vector<double>& v) {
  Mat4 m = Mat4::Identity();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c) m(r, c) = v[static_cast<std::size_t>(r * 4 + c)];
  return m;
}

}  // namespace detail

/// Reads the sensor-to-camera transform from a calibration file made of
/// lines "<key>: v0 ... v11".
inline Pose load_calibration_tr(const std::string& calib_path) {
  std::ifstream in(calib_path);
  if (!in) throw IoError("cannot open calibration: " + calib_path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("Tr:", 0) != 0) continue;
    const auto vals = detail::parse_numbers(line.substr(3));
    if (vals.size() != 12)
      throw CalibrationError("Tr line must carry 12 values: " + calib_path);
    return Pose(detail::mat4_from_row_major_3x4(vals));
  }
  throw CalibrationError("no Tr line in calibration file: " + calib_path);
}

/// Loads odometry-format poses (12 numbers per line, row-major 3x4, camera
/// frame) and converts them to the LiDAR frame: T_lidar = Tr^-1 * T_cam * Tr.
inline std::vector<Pose> load_poses(const std::string& pose_path,
                                    const std::string& calib_path) {
  const Pose tr = load_calibration_tr(calib_path);
  const Pose tr_inv = tr.inverse();

  std::ifstream in(pose_path);
  if (!in) throw IoError("cannot open poses: " + pose_path);
  std::vector<Pose> poses;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    const auto vals = detail::parse_numbers(line);
    if (vals.size() != 12)
      throw MalformedFileError("pose line " + std::to_string(line_no) +
                               " has " + std::to_string(vals.size()) +
                               " values, expected 12");
    const Pose cam(detail::mat4_from_row_major_3x4(vals));
    Pose lidar = tr_inv * cam * tr;
    lidar.validate();
    poses.push_back(lidar);
  }
  return poses;
}

/// Per-point class probabilities: point_count x 20 little-endian float32.
/// Vectors whose sum is within 1e-3 of one are renormalized; anything
/// further off is rejected.
inline std::vector<SemanticVector> load_semantics(const std::string& path,
                                                  std::size_t point_count) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw IoError("cannot open semantics: " + path);
  const std::streamoff size = in.tellg();
  const std::streamoff expected =
      static_cast<std::streamoff>(point_count * kSemanticClasses * 4);
  if (size != expected)
    throw MalformedFileError("semantics size mismatch for " + path + ": got " +
                             std::to_string(size) + " bytes, expected " +
                             std::to_string(expected));
  in.seekg(0);
  std::vector<float> raw(point_count * kSemanticClasses);
  if (point_count > 0) {
    in.read(reinterpret_cast<char*>(raw.data()),
            static_cast<std::streamsize>(raw.size() * 4));
    if (!in) throw IoError("failed reading semantics: " + path);
  }

  std::vector<SemanticVector> out(point_count);
  for (std::size_t i = 0; i < point_count; ++i) {
    double sum = 0.0;
    for (int c = 0; c < kSemanticClasses; ++c) {
      const double v = raw[i * kSemanticClasses + static_cast<std::size_t>(c)];
      if (v < 0.0)
        throw ValidationError("negative class probability at point " +
                              std::to_string(i));
      out[i][static_cast<std::size_t>(c)] = v;
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-3)
      throw ValidationError("class probabilities at point " +
                            std::to_string(i) + " sum to " +
                            std::to_string(sum));
    for (auto& v : out[i]) v /= sum;
  }
  return out;
}

}  // namespace overlap_loop
