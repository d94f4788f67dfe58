#pragma once

#include "kadtk/types.hpp"

namespace kadtk {

struct SymEigen {
  Vec values;   // descending
  Mat vectors;  // orthonormal columns, vectors.col(k) pairs with values[k]
};

/// Eigendecomposition of a symmetric matrix (checked to 1e-8 relative in the
/// infinity norm). Returns m = V diag(values) V^T with values descending.
SymEigen sym_eigendecompose(const Mat& m);

/// tr((Sx^{1/2} Sy Sx^{1/2})^{1/2}) for symmetric PSD inputs, the stable
/// symmetric form of tr(sqrt(Sx Sy)). Eigenvalues in [-1e-8 * ||.||_inf, 0)
/// are clamped to zero; anything lower is a numerical error.
double trace_sqrt_product(const Mat& sx, const Mat& sy);

}  // namespace kadtk
