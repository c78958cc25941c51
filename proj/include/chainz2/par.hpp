#pragma once

#include <functional>

#include "chainz2/common.hpp"
#include "chainz2/fock.hpp"

namespace chainz2::par {

// worker cap for parallel loops; 0 means the OpenMP default
void set_threads(int n);
int threads();

// index loop over [0, n); parallel body must not share mutable state
void parallel_for(int n, const std::function<void(int)>& body);
void serial_for(int n, const std::function<void(int)>& body);

// sparse matrix-vector product kernels; the serial form is the reference
CVec spmv_serial(const SpMat& m, const CVec& x);
CVec spmv(const SpMat& m, const CVec& x);

}  // namespace chainz2::par
