#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "overlap_loop/errors.hpp"
#include "overlap_loop/geometry.hpp"
#include "overlap_loop/point_cloud.hpp"
#include "overlap_loop/tensor_blob.hpp"

namespace overlap_loop {

struct ProjectionConfig {
  int width = 900;
  int height = 64;
  double fov_up = deg_to_rad(3.0);    // above the horizon
  double fov_down = deg_to_rad(25.0); // below the horizon, stored positive
  double max_range = 75.0;            // meters

  double fov() const { return fov_up + fov_down; }

  void validate() const {
    if (width <= 0 || height <= 0)
      throw ValidationError("projection image extents must be positive");
    if (fov() <= 0.0) throw ValidationError("vertical field of view must be positive");
    if (max_range <= 0.0) throw ValidationError("max_range must be positive");
  }

  bool operator==(const ProjectionConfig&) const = default;
};

/// Continuous image coordinates of a 3D point under the spherical
/// projection. Columns wrap in yaw; rows span [fov_up, -fov_down].
inline void project_point(const Vec3& p, const ProjectionConfig& cfg,
                          double& u, double& v, double& range) {
  range = p.norm();
  const double yaw = std::atan2(p.y(), p.x());
  const double pitch = std::asin(p.z() / range);
  u = 0.5 * (1.0 - yaw / kPi) * cfg.width;
  v = (1.0 - (pitch + cfg.fov_up) / cfg.fov()) * cfg.height;
}

/// Multi-channel projection of one scan. Channels are row-major h*w with
/// pixel (row v, column u) at index v*w + u; vertex/normal/semantic hold
/// three values per pixel.
struct ScanImage {
  int h = 0;
  int w = 0;
  ProjectionConfig cfg;

  std::vector<double> vertex;     // 3 per pixel, sensor frame
  std::vector<double> range;      // meters, 0 when invalid
  std::vector<std::uint8_t> valid;
  std::vector<double> normal;     // 3 per pixel, unit when normal_valid
  std::vector<std::uint8_t> normal_valid;
  std::vector<double> intensity;
  std::vector<double> semantic;   // 3 per pixel (compressed), if has_semantic
  bool has_semantic = false;
  std::vector<double> semantic_raw;  // 20 per pixel, transient, if has_raw_semantic
  bool has_raw_semantic = false;
  std::vector<std::int32_t> point_index;  // winning point id, -1 if none

  ScanImage() = default;
  ScanImage(int height, int width, const ProjectionConfig& config)
      : h(height), w(width), cfg(config) {
    const std::size_t n = static_cast<std::size_t>(h) * static_cast<std::size_t>(w);
    vertex.assign(n * 3, 0.0);
    range.assign(n, 0.0);
    valid.assign(n, 0);
    normal.assign(n * 3, 0.0);
    normal_valid.assign(n, 0);
    intensity.assign(n, 0.0);
    point_index.assign(n, -1);
  }

  std::size_t idx(int v, int u) const {
    return static_cast<std::size_t>(v) * static_cast<std::size_t>(w) +
           static_cast<std::size_t>(u);
  }

  Vec3 vertex_at(int v, int u) const {
    const std::size_t i = idx(v, u) * 3;
    return Vec3(vertex[i], vertex[i + 1], vertex[i + 2]);
  }

  Vec3 normal_at(int v, int u) const {
    const std::size_t i = idx(v, u) * 3;
    return Vec3(normal[i], normal[i + 1], normal[i + 2]);
  }

  std::size_t valid_count() const {
    std::size_t n = 0;
    for (auto m : valid) n += m;
    return n;
  }

  bool same_shape(const ScanImage& other) const {
    return h == other.h && w == other.w;
  }
};

/// Spherical projection: each in-range point lands in pixel
/// (floor(u) mod w, floor(v)); the nearest point wins a contested pixel,
/// first-seen winning exact range ties.
inline ScanImage project(const PointCloud& cloud, const ProjectionConfig& cfg) {
  cfg.validate();
  ScanImage img(cfg.height, cfg.width, cfg);
  if (cloud.has_semantics()) {
    img.semantic_raw.assign(
        static_cast<std::size_t>(cfg.height) * static_cast<std::size_t>(cfg.width) *
            kSemanticClasses,
        0.0);
    img.has_raw_semantic = true;
  }

  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.points[i];
    double uf, vf, r;
    project_point(p, cfg, uf, vf, r);
    if (!(r > 0.0) || r > cfg.max_range || !std::isfinite(uf) || !std::isfinite(vf))
      continue;
    int u = static_cast<int>(std::floor(uf));
    // Yaw is cyclic: u == w (atan2 == -pi) wraps to column 0.
    u = ((u % cfg.width) + cfg.width) % cfg.width;
    const int v = static_cast<int>(std::floor(vf));
    if (v < 0 || v >= cfg.height) continue;

    const std::size_t px = img.idx(v, u);
    if (img.valid[px] && img.range[px] <= r) continue;
    img.valid[px] = 1;
    img.range[px] = r;
    img.vertex[px * 3 + 0] = p.x();
    img.vertex[px * 3 + 1] = p.y();
    img.vertex[px * 3 + 2] = p.z();
    img.intensity[px] = cloud.remission[i];
    img.point_index[px] = static_cast<std::int32_t>(i);
    if (img.has_raw_semantic) {
      const auto& s = cloud.semantics[i];
      for (int c = 0; c < kSemanticClasses; ++c)
        img.semantic_raw[px * kSemanticClasses + static_cast<std::size_t>(c)] =
            s[static_cast<std::size_t>(c)];
    }
  }
  return img;
}

/// Fills the normal channel from forward differences on the vertex map:
/// n = normalize((V(u+1,v) - V(u,v)) x (V(u,v+1) - V(u,v))), with cyclic
/// wrap in u, flipped so normals face the sensor. Pixels without both
/// neighbors, or with a degenerate cross product, stay normal-invalid.
inline void compute_normals(ScanImage& img) {
  std::fill(img.normal.begin(), img.normal.end(), 0.0);
  std::fill(img.normal_valid.begin(), img.normal_valid.end(), 0);
  for (int v = 0; v < img.h; ++v) {
    for (int u = 0; u < img.w; ++u) {
      if (!img.valid[img.idx(v, u)]) continue;
      const int ur = (u + 1) % img.w;
      const int vd = v + 1;
      if (vd >= img.h) continue;
      if (!img.valid[img.idx(v, ur)] || !img.valid[img.idx(vd, u)]) continue;

      const Vec3 center = img.vertex_at(v, u);
      const Vec3 right = img.vertex_at(v, ur) - center;
      const Vec3 down = img.vertex_at(vd, u) - center;
      Vec3 n = right.cross(down);
      const double norm = n.norm();
      if (norm < 1e-8) continue;
      n /= norm;
      if (n.dot(center) > 0.0) n = -n;

      const std::size_t px = img.idx(v, u);
      img.normal[px * 3 + 0] = n.x();
      img.normal[px * 3 + 1] = n.y();
      img.normal[px * 3 + 2] = n.z();
      img.normal_valid[px] = 1;
    }
  }
}

/// Serializes the persistent channels to a float32 blob, shape h x w x C.
inline TensorBlob scan_image_to_blob(const ScanImage& img) {
  std::vector<std::string> names = {"vertex_x", "vertex_y", "vertex_z",
                                    "range",    "valid",    "normal_x",
                                    "normal_y", "normal_z", "normal_valid",
                                    "intensity"};
  if (img.has_semantic)
    names.insert(names.end(), {"sem_pca_0", "sem_pca_1", "sem_pca_2"});
  const int ch = static_cast<int>(names.size());

  TensorBlob blob;
  blob.shape = {static_cast<std::uint64_t>(img.h),
                static_cast<std::uint64_t>(img.w),
                static_cast<std::uint64_t>(ch)};
  blob.channels = names;
  blob.meta = {{"width", img.cfg.width},
               {"height", img.cfg.height},
               {"fov_up_rad", img.cfg.fov_up},
               {"fov_down_rad", img.cfg.fov_down},
               {"max_range", img.cfg.max_range}};
  blob.data.resize(static_cast<std::size_t>(img.h) * img.w * ch);

  const std::size_t n = static_cast<std::size_t>(img.h) * img.w;
  for (std::size_t px = 0; px < n; ++px) {
    float* out = &blob.data[px * static_cast<std::size_t>(ch)];
    out[0] = static_cast<float>(img.vertex[px * 3 + 0]);
    out[1] = static_cast<float>(img.vertex[px * 3 + 1]);
    out[2] = static_cast<float>(img.vertex[px * 3 + 2]);
    out[3] = static_cast<float>(img.range[px]);
    out[4] = img.valid[px] ? 1.0f : 0.0f;
    out[5] = static_cast<float>(img.normal[px * 3 + 0]);
    out[6] = static_cast<float>(img.normal[px * 3 + 1]);
    out[7] = static_cast<float>(img.normal[px * 3 + 2]);
    out[8] = img.normal_valid[px] ? 1.0f : 0.0f;
    out[9] = static_cast<float>(img.intensity[px]);
    if (img.has_semantic)
      for (int c = 0; c < 3; ++c)
        out[10 + c] = static_cast<float>(img.semantic[px * 3 + static_cast<std::size_t>(c)]);
  }
  return blob;
}

inline ScanImage scan_image_from_blob(const TensorBlob& blob) {
  if (blob.shape.size() != 3)
    throw MalformedFileError("scan image blob must be rank 3");
  const int h = static_cast<int>(blob.shape[0]);
  const int w = static_cast<int>(blob.shape[1]);
  const int ch = static_cast<int>(blob.shape[2]);
  if (ch != 10 && ch != 13)
    throw MalformedFileError("scan image blob must have 10 or 13 channels");

  ProjectionConfig cfg;
  cfg.width = w;
  cfg.height = h;
  if (blob.meta.is_object()) {
    cfg.width = blob.meta.value("width", w);
    cfg.height = blob.meta.value("height", h);
    cfg.fov_up = blob.meta.value("fov_up_rad", cfg.fov_up);
    cfg.fov_down = blob.meta.value("fov_down_rad", cfg.fov_down);
    cfg.max_range = blob.meta.value("max_range", cfg.max_range);
  }

  ScanImage img(h, w, cfg);
  if (ch == 13) {
    img.has_semantic = true;
    img.semantic.assign(static_cast<std::size_t>(h) * w * 3, 0.0);
  }
  const std::size_t n = static_cast<std::size_t>(h) * w;
  for (std::size_t px = 0; px < n; ++px) {
    const float* in = &blob.data[px * static_cast<std::size_t>(ch)];
    img.vertex[px * 3 + 0] = in[0];
    img.vertex[px * 3 + 1] = in[1];
    img.vertex[px * 3 + 2] = in[2];
    img.range[px] = in[3];
    img.valid[px] = in[4] > 0.5f ? 1 : 0;
    img.normal[px * 3 + 0] = in[5];
    img.normal[px * 3 + 1] = in[6];
    img.normal[px * 3 + 2] = in[7];
    img.normal_valid[px] = in[8] > 0.5f ? 1 : 0;
    img.intensity[px] = in[9];
    if (ch == 13)
      for (int c = 0; c < 3; ++c)
        img.semantic[px * 3 + static_cast<std::size_t>(c)] = in[10 + c];
  }
  return img;
}

}  // namespace overlap_loop
