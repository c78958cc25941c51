#pragma once

#include "chainz2/common.hpp"

namespace chainz2 {

// dense real skew-symmetric matrix of even dimension; exactly
// antisymmetrized on construction
class SkewMatrix {
 public:
  explicit SkewMatrix(Mat entries);
  int n() const { return static_cast<int>(a_.rows()); }
  const Mat& entries() const { return a_; }

 private:
  Mat a_;
};

// V * A * V^T = [[0, diag(E)], [-diag(E), 0]], energies ascending,
// det_sign tracked exactly through the reduction
struct CanonicalSkewForm {
  Vec energies;
  Mat orthogonal;
  int det_sign = 1;
};

double pfaffian(const SkewMatrix& a);
CanonicalSkewForm canonical_form(const SkewMatrix& a, double tol = 1e-8);
int kernel_dim(const SkewMatrix& a, double tol = 1e-8);
int kernel_dim(const Mat& symmetric, double tol = 1e-8);

}  // namespace chainz2
