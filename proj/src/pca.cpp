#include "mdepth/deepest.hpp"

#include "mdepth/errors.hpp"

#include <algorithm>
#include <cmath>

namespace mdepth {

PcaModel pca_fit(const Eigen::MatrixXd& data, double tsh) {
  const auto n = data.rows();
  const auto q = data.cols();
  if (n < 2) throw InsufficientSample("PCA needs at least 2 rows");
  if (q < 1) throw InvalidArgument("PCA needs at least one column");
  if (!(tsh > 0.0 && tsh <= 1.0)) throw InvalidArgument("PCA threshold must lie in (0, 1]");

  PcaModel model;
  model.tsh = tsh;
  model.mean = data.colwise().mean().transpose();
  const Eigen::MatrixXd centered = data.rowwise() - model.mean.transpose();
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw NumericError("PCA eigendecomposition failed");

  // Eigen sorts ascending; reverse to descending.
  const Eigen::VectorXd values = eig.eigenvalues().reverse().cwiseMax(0.0);
  const Eigen::MatrixXd vectors = eig.eigenvectors().rowwise().reverse();
  const double total = values.sum();

  const Eigen::Index cap = std::min(n, q);
  Eigen::Index k = cap;
  if (total > 0.0) {
    double cumulative = 0.0;
    for (Eigen::Index i = 0; i < q; ++i) {
      cumulative += values(i) / total;
      if (cumulative >= tsh - 1e-12) {
        k = i + 1;
        break;
      }
    }
  }
  const Eigen::Index r = std::min(std::max<Eigen::Index>(2, k), cap);

  model.r = static_cast<std::size_t>(r);
  model.components.resize(r, q);
  model.explained.resize(r);
  for (Eigen::Index c = 0; c < r; ++c) {
    Eigen::VectorXd dir = vectors.col(c);
    for (Eigen::Index i = 0; i < q; ++i) {
      if (std::abs(dir(i)) > 1e-12) {
        if (dir(i) < 0.0) dir = -dir;
        break;
      }
    }
    model.components.row(c) = dir.transpose();
    model.explained(c) = total > 0.0 ? values(c) / total : 0.0;
  }
  return model;
}

Eigen::VectorXd PcaModel::encode(const Eigen::VectorXd& v) const {
  if (v.size() != mean.size()) throw InvalidArgument("PCA encode: dimension mismatch");
  return components * (v - mean);
}

Eigen::VectorXd PcaModel::decode(const Eigen::VectorXd& w) const {
  if (w.size() != components.rows()) throw InvalidArgument("PCA decode: dimension mismatch");
  return mean + components.transpose() * w;
}

}  // namespace mdepth
