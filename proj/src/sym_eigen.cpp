#include "kadtk/sym_eigen.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

namespace kadtk {

namespace {

double inf_norm(const Mat& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

void check_symmetric(const Mat& m, const char* name) {
  if (m.rows() != m.cols()) {
    throw InputError(std::string(name) + " must be square (got " +
                     std::to_string(m.rows()) + " x " + std::to_string(m.cols()) + ")");
  }
  const double scale = m.cwiseAbs().maxCoeff();
  const double skew = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (skew > 1e-8 * scale && skew > 0.0) {
    throw InputError(std::string(name) + " is not symmetric: max |m - m^T| = " +
                     std::to_string(skew) + " exceeds 1e-8 * " + std::to_string(scale));
  }
}

// Clamp small negative eigenvalues to zero; reject anything below tolerance.
void clamp_spectrum(Vec& values, double tol, const char* what) {
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values[i] < -tol) {
      throw NumericError(std::string(what) + " has eigenvalue " +
                         std::to_string(values[i]) + " below the clamp threshold -" +
                         std::to_string(tol));
    }
    if (values[i] < 0.0) values[i] = 0.0;
  }
}

}  // namespace

SymEigen sym_eigendecompose(const Mat& m) {
  check_symmetric(m, "matrix");
  const Mat sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw NumericError("symmetric eigendecomposition did not converge");
  }
  const Eigen::Index d = m.rows();
  SymEigen out;
  out.values = Vec(d);
  out.vectors = Mat(d, d);
  // Eigen returns ascending order; flip to descending.
  for (Eigen::Index k = 0; k < d; ++k) {
    out.values[k] = solver.eigenvalues()[d - 1 - k];
    out.vectors.col(k) = solver.eigenvectors().col(d - 1 - k);
  }
  return out;
}

double trace_sqrt_product(const Mat& sx, const Mat& sy) {
  check_symmetric(sx, "sx");
  check_symmetric(sy, "sy");
  if (sx.rows() != sy.rows()) {
    throw InputError("trace_sqrt_product dimension mismatch: " +
                     std::to_string(sx.rows()) + " vs " + std::to_string(sy.rows()));
  }

  SymEigen ex = sym_eigendecompose(sx);
  clamp_spectrum(ex.values, 1e-8 * inf_norm(sx), "sx");

  // Sx^{1/2} = V sqrt(D) V^T, then M = Sx^{1/2} Sy Sx^{1/2}.
  const Mat root = ex.vectors * ex.values.cwiseSqrt().asDiagonal() * ex.vectors.transpose();
  Mat inner = root * sy * root;
  inner = 0.5 * (inner + inner.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Mat> solver(inner, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericError("eigenvalue iteration failed in trace_sqrt_product");
  }
  Vec lam = solver.eigenvalues();
  clamp_spectrum(lam, 1e-8 * inf_norm(inner), "sqrt-product matrix");

  double trace = 0.0;
  for (Eigen::Index i = 0; i < lam.size(); ++i) trace += std::sqrt(lam[i]);
  return trace;
}

}  // namespace kadtk
