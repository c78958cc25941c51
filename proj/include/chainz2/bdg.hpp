#pragma once

#include <utility>

#include "chainz2/common.hpp"
#include "chainz2/skew.hpp"
#include "chainz2/z2report.hpp"

namespace chainz2 {

// Hermitian 2L x 2L matrix in (particle, hole) block order with
// K conj(H) K = -H for K = 1 (x) sigma_1; exactly symmetrized on construction
class BdGMatrix {
 public:
  explicit BdGMatrix(CMat h);
  int sites() const { return static_cast<int>(h_.rows()) / 2; }
  const CMat& matrix() const { return h_; }

 private:
  CMat h_;
};

// unitary with K conj(W) K = W
struct CanonicalTransform {
  CMat w;
};

// real 2L x 2L with J^T = -J and J^2 = -1
struct ComplexStructure {
  Mat j;
};

// real skew Majorana form A = -(i/2) C_theta^* H C_theta in
// (b_odd; b_even) block ordering
SkewMatrix majorana_form(const BdGMatrix& h, double theta = 0.0);

// W H W^* = diag(E, -E) with E >= 0; deterministic up to degeneracies,
// which are resolved by Gram-Schmidt in input order
std::pair<CanonicalTransform, Vec> bogoliubov_diagonalize(const BdGMatrix& h);

// sign of the Pfaffian of the Majorana form in site-interleaved ordering;
// requires a spectral gap
Z2Report kitaev_index(const BdGMatrix& h, double tol = 1e-8);

// spectral flattening J = -A|A|^{-1}; kernel (if allowed) completed with
// consecutive [[0,1],[-1,0]] blocks on the orthonormalized kernel basis
ComplexStructure flatten(const BdGMatrix& h, double tol = 1e-8,
                         bool complete_kernel = false);
ComplexStructure flatten(const SkewMatrix& a, double tol = 1e-8,
                         bool complete_kernel = false);

// sign of det for the real orthogonal C^* W C associated to a canonical
// transform, extracted sign-exactly
int canonical_det_sign(const CanonicalTransform& w);

}  // namespace chainz2
