#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "overlap_loop/errors.hpp"
#include "overlap_loop/point_cloud.hpp"
#include "overlap_loop/range_projection.hpp"

namespace overlap_loop {

/// Linear compression of 20-class probability vectors to 3 components.
struct PcaModel {
  Eigen::Matrix<double, kSemanticClasses, 1> mean;
  Eigen::Matrix<double, kSemanticClasses, 3> basis;  // orthonormal columns

  void validate() const {
    const Eigen::Matrix3d gram = basis.transpose() * basis;
    if ((gram - Eigen::Matrix3d::Identity()).norm() > 1e-6)
      throw ValidationError("PCA basis columns are not orthonormal");
  }

  Vec3 compress(const SemanticVector& p) const {
    Eigen::Matrix<double, kSemanticClasses, 1> x;
    for (int i = 0; i < kSemanticClasses; ++i) x(i) = p[static_cast<std::size_t>(i)];
    return basis.transpose() * (x - mean);
  }
};

/// Principal components of a probability-vector corpus: mean plus the top-3
/// eigenvectors of the sample covariance, ordered by descending eigenvalue,
/// each column signed so its largest-magnitude entry is positive.
inline PcaModel fit_pca(const std::vector<SemanticVector>& corpus) {
  const std::size_t n = corpus.size();
  if (n < kSemanticClasses)
    throw ValidationError("PCA corpus too small: " + std::to_string(n) +
                          " vectors, need at least 20");

  Eigen::Matrix<double, kSemanticClasses, 1> mean;
  mean.setZero();
  for (const auto& p : corpus)
    for (int i = 0; i < kSemanticClasses; ++i) mean(i) += p[static_cast<std::size_t>(i)];
  mean /= static_cast<double>(n);

  Eigen::Matrix<double, kSemanticClasses, kSemanticClasses> cov;
  cov.setZero();
  for (const auto& p : corpus) {
    Eigen::Matrix<double, kSemanticClasses, 1> d;
    for (int i = 0; i < kSemanticClasses; ++i)
      d(i) = p[static_cast<std::size_t>(i)] - mean(i);
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<
      Eigen::Matrix<double, kSemanticClasses, kSemanticClasses>>
      solver(cov);
  if (solver.info() != Eigen::Success)
    throw NumericError("PCA eigendecomposition failed");

  // Eigenvalues come out ascending; the top three live in the last columns.
  PcaModel model;
  model.mean = mean;
  if (solver.eigenvalues()(kSemanticClasses - 3) <= 1e-12)
    throw ValidationError("degenerate corpus: covariance rank below 3");
  for (int k = 0; k < 3; ++k) {
    Eigen::Matrix<double, kSemanticClasses, 1> col =
        solver.eigenvectors().col(kSemanticClasses - 1 - k);
    int arg = 0;
    for (int i = 1; i < kSemanticClasses; ++i)
      if (std::abs(col(i)) > std::abs(col(arg))) arg = i;
    if (col(arg) < 0.0) col = -col;
    model.basis.col(k) = col;
  }
  model.validate();
  return model;
}

/// Fills the compressed semantic channel for every valid pixel carrying a
/// raw probability vector.
inline void compress_semantics(ScanImage& img, const PcaModel& model) {
  if (!img.has_raw_semantic)
    throw ValidationError("scan image carries no per-pixel class probabilities");
  img.semantic.assign(static_cast<std::size_t>(img.h) * img.w * 3, 0.0);
  img.has_semantic = true;
  const std::size_t n = static_cast<std::size_t>(img.h) * img.w;
  for (std::size_t px = 0; px < n; ++px) {
    if (!img.valid[px]) continue;
    SemanticVector p;
    for (int c = 0; c < kSemanticClasses; ++c)
      p[static_cast<std::size_t>(c)] =
          img.semantic_raw[px * kSemanticClasses + static_cast<std::size_t>(c)];
    const Vec3 z = model.compress(p);
    img.semantic[px * 3 + 0] = z.x();
    img.semantic[px * 3 + 1] = z.y();
    img.semantic[px * 3 + 2] = z.z();
  }
}

inline void save_pca_model(const std::string& path, const PcaModel& model) {
  nlohmann::json j;
  j["mean"] = std::vector<double>(model.mean.data(), model.mean.data() + kSemanticClasses);
  std::vector<std::vector<double>> basis;
  for (int k = 0; k < 3; ++k) {
    basis.emplace_back(kSemanticClasses);
    for (int i = 0; i < kSemanticClasses; ++i)
      basis.back()[static_cast<std::size_t>(i)] = model.basis(i, k);
  }
  j["basis_columns"] = basis;
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

inline PcaModel load_pca_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw MalformedFileError("bad PCA model file " + path + ": " + e.what());
  }
  PcaModel model;
  const auto mean = j.at("mean").get<std::vector<double>>();
  const auto basis = j.at("basis_columns").get<std::vector<std::vector<double>>>();
  if (mean.size() != kSemanticClasses || basis.size() != 3)
    throw MalformedFileError("PCA model has wrong extents: " + path);
  for (int i = 0; i < kSemanticClasses; ++i) model.mean(i) = mean[static_cast<std::size_t>(i)];
  for (int k = 0; k < 3; ++k) {
    if (basis[static_cast<std::size_t>(k)].size() != kSemanticClasses)
      throw MalformedFileError("PCA basis column has wrong length: " + path);
    for (int i = 0; i < kSemanticClasses; ++i)
      model.basis(i, k) = basis[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
  }
  model.validate();
  return model;
}

}  // namespace overlap_loop
