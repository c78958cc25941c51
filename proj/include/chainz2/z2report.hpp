#pragma once

#include <vector>

namespace chainz2 {

// sign = (-1)^(sum kernel_counts / 2); kernel_counts entries are even
struct Z2Report {
  int sign = 1;
  std::vector<int> kernel_counts;
  std::vector<double> crossings;
  double tol = 0.0;
  std::vector<double> partition;

  // op-specific diagnostics
  double pfaffian_value = 0.0;  // kitaev_index
  double gap = 0.0;             // kitaev_index: smallest singular value
  double hs_norm = 0.0;         // relative_index / theta_minus_index
  double hs_norm_next = 0.0;    // theta_minus_index, larger truncation
  int sign_next = 0;            // theta_minus_index, larger truncation
  bool non_stabilized = false;  // theta_minus_index: signs disagree
};

}  // namespace chainz2
