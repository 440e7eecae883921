#include "mdepth/deepest.hpp"

#include "mdepth/errors.hpp"

#include <cmath>

namespace mdepth {

std::size_t triangular_dimension(std::size_t q) {
  std::size_t p = 0;
  while (p * (p + 1) / 2 < q) ++p;
  if (p * (p + 1) / 2 != q || p == 0) {
    throw InvalidArgument("coordinate length " + std::to_string(q) + " is not p(p+1)/2");
  }
  return p;
}

Eigen::VectorXd cholesky_encode(const CorrelationMatrix& x) {
  const Eigen::LLT<Eigen::MatrixXd> llt(x.entries());
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("Cholesky factorization failed");
  const Eigen::MatrixXd l = llt.matrixL();
  const auto p = l.rows();
  Eigen::VectorXd v(p * (p + 1) / 2);
  Eigen::Index t = 0;
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) v(t++) = l(i, j);
  return v;
}

CorrelationMatrix cholesky_decode(const Eigen::VectorXd& v) {
  const auto p = static_cast<Eigen::Index>(triangular_dimension(static_cast<std::size_t>(v.size())));
  if (!v.allFinite()) throw DegenerateDecode("coordinate vector has non-finite entries");
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(p, p);
  Eigen::Index t = 0;
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) l(i, j) = v(t++);
  const Eigen::MatrixXd s = l * l.transpose();
  Eigen::VectorXd inv_sd(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    if (!(s(i, i) > 1e-12)) throw DegenerateDecode("decoded matrix has a vanishing diagonal entry");
    inv_sd(i) = 1.0 / std::sqrt(s(i, i));
  }
  Eigen::MatrixXd r = inv_sd.asDiagonal() * s * inv_sd.asDiagonal();
  r = 0.5 * (r + r.transpose()).eval();
  r.diagonal().setOnes();
  try {
    return CorrelationMatrix(std::move(r));
  } catch (const Error& e) {
    throw DegenerateDecode(std::string("decoded matrix is not a valid correlation matrix: ") + e.what());
  }
}

Eigen::VectorXd CholeskyChart::encode(const Object& x) const {
  const auto* c = std::get_if<CorrelationMatrix>(&x);
  if (c == nullptr) throw InvalidArgument("Cholesky chart encodes correlation matrices only");
  if (c->dim() != p_) throw InvalidArgument("correlation matrix dimension does not match the chart");
  return cholesky_encode(*c);
}

Object CholeskyChart::decode(const Eigen::VectorXd& v) const {
  if (static_cast<std::size_t>(v.size()) != coordinate_dim()) {
    throw InvalidArgument("coordinate vector length does not match the chart");
  }
  return cholesky_decode(v);
}

}  // namespace mdepth
