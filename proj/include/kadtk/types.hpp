#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace kadtk {

// Row-major everywhere: embedding rows are contiguous, which the pairwise
// kernels rely on.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;

/// Element type of an embedding payload. Values are always promoted to
/// double before any arithmetic; the tag tracks storage precision only.
enum class Dtype { f32, f64 };

inline std::size_t dtype_size(Dtype t) { return t == Dtype::f32 ? 4 : 8; }
inline const char* dtype_name(Dtype t) { return t == Dtype::f32 ? "f32le" : "f64le"; }

/// Invalid or inconsistent caller input (bad files, shape mismatches,
/// violated preconditions). CLI maps this to exit code 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical routine could not produce a trustworthy result
/// (non-convergence, eigenvalue outside tolerance). Exit code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Resource exhaustion (e.g. allocation failure on a large grid cell).
/// Exit code 3.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace kadtk
