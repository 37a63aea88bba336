#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "overlap_loop/errors.hpp"
#include "overlap_loop/geometry.hpp"

namespace overlap_loop {

constexpr int kSemanticClasses = 20;
using SemanticVector = std::array<double, kSemanticClasses>;

/// One LiDAR scan in the sensor frame. semantics is empty unless per-point
/// class probabilities were loaded alongside the scan.
struct PointCloud {
  std::vector<Vec3> points;
  std::vector<double> remission;
  std::vector<SemanticVector> semantics;

  std::size_t size() const { return points.size(); }
  bool has_semantics() const { return !semantics.empty(); }

  void validate() const {
    if (points.size() != remission.size())
      throw ValidationError("point/remission count mismatch");
    if (!semantics.empty()) {
      if (semantics.size() != points.size())
        throw ValidationError("point/semantics count mismatch");
      for (const auto& s : semantics) {
        double sum = 0.0;
        for (double v : s) {
          if (v < 0.0) throw ValidationError("negative class probability");
          sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-4)
          throw ValidationError("class probabilities do not sum to 1");
      }
    }
  }
};

inline PointCloud transform_cloud(const PointCloud& cloud, const Pose& pose) {
  PointCloud out = cloud;
  for (auto& p : out.points) p = pose.apply(p);
  return out;
}

inline PointCloud rotate_cloud_z(const PointCloud& cloud, double rad) {
  return transform_cloud(cloud, pose_rot_z(rad));
}

}  // namespace overlap_loop
