#include "edgebook/cluster/projection.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "edgebook/core/errors.hpp"

namespace edgebook::cluster {
namespace {

// Eigenvalues below this fraction of the total variance are treated as zero.
constexpr double kRelativeVarianceFloor = 1e-20;

void orient(Eigen::VectorXd& loading) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < loading.size(); ++i) {
    if (std::abs(loading[i]) > std::abs(loading[best])) best = i;
  }
  if (loading[best] < 0.0) loading = -loading;
}

}  // namespace

std::vector<Point2> project_2d(std::span<const Vector> vectors) {
  if (vectors.empty()) fail(ErrorCode::kEmptyInput, "no vectors to project");
  const auto n = static_cast<Eigen::Index>(vectors.size());
  const auto dim = static_cast<Eigen::Index>(vectors.front().size());
  Eigen::MatrixXd x(n, dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(vectors[i].size()) != dim) {
      fail(ErrorCode::kDimensionMismatch,
           "vector dimension " + std::to_string(vectors[i].size()) + " != " +
               std::to_string(dim));
    }
    for (Eigen::Index d = 0; d < dim; ++d) x(i, d) = vectors[i][d];
  }
  std::vector<Point2> out(vectors.size());
  if (n < 2 || dim == 0) return out;
  // Identical inputs can leave round-off after centering; compare the raw
  // scale so that residue is never promoted to an axis.
  const double raw_scale = x.squaredNorm();
  x.rowwise() -= x.colwise().mean();
  const double total = x.squaredNorm();
  if (total == 0.0 || total <= kRelativeVarianceFloor * raw_scale) return out;

  // Eigen-decompose whichever Gram matrix is smaller; loadings are recovered
  // from the sample-space eigenvectors when n < dim.
  const bool feature_space = dim <= n;
  const Eigen::MatrixXd gram =
      feature_space ? Eigen::MatrixXd(x.transpose() * x) : Eigen::MatrixXd(x * x.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  if (solver.info() != Eigen::Success) {
    fail(ErrorCode::kInvalidArgument, "PCA eigen-decomposition failed");
  }
  const Eigen::VectorXd& values = solver.eigenvalues();
  const Eigen::MatrixXd& vecs = solver.eigenvectors();
  const Eigen::Index m = values.size();

  for (int axis = 0; axis < 2 && axis < m; ++axis) {
    const Eigen::Index col = m - 1 - axis;
    const double lambda = values[col];
    if (!(lambda > kRelativeVarianceFloor * total)) break;
    Eigen::VectorXd loading =
        feature_space ? Eigen::VectorXd(vecs.col(col))
                      : Eigen::VectorXd(x.transpose() * vecs.col(col) / std::sqrt(lambda));
    loading.normalize();
    orient(loading);
    const Eigen::VectorXd scores = x * loading;
    for (Eigen::Index i = 0; i < n; ++i) {
      (axis == 0 ? out[i].x : out[i].y) = scores[i];
    }
  }
  return out;
}

}  // namespace edgebook::cluster
