#pragma once

#include <functional>
#include <vector>

#include "chainz2/bdg.hpp"

namespace chainz2 {

// discretized path of skew Majorana forms; endpoints must be gapped
class HamiltonianPath {
 public:
  using Sampler = std::function<SkewMatrix(double)>;
  HamiltonianPath(Sampler sampler, std::vector<double> grid,
                  double gap_tol = 1e-8);
  SkewMatrix at(double t) const { return sampler_(t); }
  const std::vector<double>& grid() const { return grid_; }
  double gap_tol() const { return gap_tol_; }

 private:
  Sampler sampler_;
  std::vector<double> grid_;
  double gap_tol_;
};

Z2Report ind2(const ComplexStructure& j0, const ComplexStructure& j1,
              double tol = 1e-8);

// sign(Pf(A0)) * sign(Pf(A1)); equals the spectral flow of any connecting
// path in finite dimension
int sf2_endpoints(const SkewMatrix& a0, const SkewMatrix& a1,
                  double tol = 1e-8);

Z2Report sf2_path(const HamiltonianPath& path, double tol = 1e-8,
                  int max_refine = 20);

// ind2 of the flattened pair plus Hilbert-Schmidt diagnostic of E0 - E1
Z2Report relative_index(const BdGMatrix& h0, const BdGMatrix& h1,
                        double tol = 1e-8, bool complete_kernel = true);

}  // namespace chainz2
