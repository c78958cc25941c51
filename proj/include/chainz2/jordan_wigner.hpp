#pragma once

#include <map>
#include <string>
#include <vector>

#include "chainz2/fock.hpp"

namespace chainz2 {

// product of single-site Paulis with a complex coefficient
struct PauliString {
  cplx coeff{0.0, 0.0};
  std::map<int, char> letters;  // site -> 'X' | 'Y' | 'Z'
};

struct SpinHamiltonian {
  int L = 0;
  std::vector<PauliString> terms;
};

// sort and merge identical letter patterns, drop negligible coefficients
SpinHamiltonian normalized(const SpinHamiltonian& h, double drop_tol = 1e-14);

// dictionary: sigma^z_j = 2 n_j - 1,
// sigma^x_j = prod_{k<j}(1 - 2 n_k) (a_j + a_j^*),
// sigma^y_j = prod_{k<j}(1 - 2 n_k) i (a_j - a_j^*)
SpinHamiltonian jw_forward(int L, const std::vector<InteractionTerm>& terms);
std::vector<InteractionTerm> jw_inverse(const SpinHamiltonian& h);

// dense 2^L matrix in the shared occupation basis (site 1 = lsb)
CMat spin_matrix(const SpinHamiltonian& h);

// line format: coefficient then site-indexed letters, e.g. "0.5  X3 X4"
std::string to_lines(const SpinHamiltonian& h);

}  // namespace chainz2
