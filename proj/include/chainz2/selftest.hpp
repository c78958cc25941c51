#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace chainz2::selftest {

struct CriterionResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// the twelve reproduction criteria, in release order
std::vector<CriterionResult> run_all(std::uint64_t seed);

CriterionResult pfaffian_identities(std::uint64_t seed);
CriterionResult kitaev_index_table();
CriterionResult flux_spectral_flow();
CriterionResult open_chain_ground_structure(std::uint64_t seed);
CriterionResult quadratic_crosscheck(std::uint64_t seed);
CriterionResult interacting_ff_chain();
CriterionResult interacting_flux_endpoints();
CriterionResult xy_band_support();
CriterionResult half_lattice_flip_index();
CriterionResult relative_index_flux();
CriterionResult martingale_structure(std::uint64_t seed);
CriterionResult spin_chain_equivalence(std::uint64_t seed);

}  // namespace chainz2::selftest
