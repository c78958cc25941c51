#pragma once

#include <Eigen/SparseCore>
#include <utility>
#include <vector>

#include "chainz2/common.hpp"

namespace chainz2 {

using SpMat = Eigen::SparseMatrix<cplx>;

// even fermionic interaction term; hop(j,k,t) = t a_j^* a_k + h.c.,
// pair(j,k,d) = d a_j a_k + h.c., chem(j,mu) = mu n_j,
// density_density(j,k,K) = K (2n_j - 1)(2n_k - 1),
// raw = coeff * ladder monomial (site, dagger), applied left to right
struct InteractionTerm {
  enum class Kind { hop, pair, chem, density_density, raw };
  Kind kind = Kind::raw;
  int j = 0, k = 0;
  cplx coeff{0.0, 0.0};
  std::vector<std::pair<int, bool>> monomial;
  bool wrap = false;  // set by closed-chain builders on the closure bond

  static InteractionTerm hop(int j, int k, cplx t);
  static InteractionTerm pair(int j, int k, cplx d);
  static InteractionTerm chem(int j, double mu);
  static InteractionTerm density_density(int j, int k, double K);
  static InteractionTerm raw(cplx c, std::vector<std::pair<int, bool>> m);
  static InteractionTerm constant(double c);
};

// operator on the 2^L occupation basis; site 1 is the least significant bit
struct FockOperator {
  int L = 0;
  SpMat op;
};

struct FockGenerators {
  int L = 0;
  std::vector<SpMat> a, ad, b;  // b has 2L entries, theta = 0 Majoranas
  SpMat N, P;
};

// L in [1, 14]
FockGenerators fock_generators(int L);

// Hermitian and parity-even, verified
FockOperator assemble(int L, const std::vector<InteractionTerm>& terms);

struct GroundSpaceReport {
  double E0 = 0.0;
  int degeneracy = 0;
  std::vector<int> parities;
  double gap = 0.0;
  CMat states;  // parity eigenvectors spanning the ground space
};

// dense solve for L <= 10, iterative lowest eigenpairs above
GroundSpaceReport ground_space(const FockOperator& h,
                               double deg_tol_scale = 1e-7);

// closed interacting chain terms; mu_e is the frustration-free chemical
// potential 2 sqrt((2K+w)^2 - Delta^2)
double kst_mu_e(double w, double delta, double K);
std::vector<InteractionTerm> kst_terms(int L, double w, double delta, double K,
                                       bool closed);
std::vector<InteractionTerm> interacting_flux_terms(int L, double w,
                                                    double delta, double K,
                                                    double alpha);

std::vector<GroundSpaceReport> flux_sweep(int L, double w, double delta,
                                          double K,
                                          const std::vector<double>& alphas);

struct KstReport {
  double mu_e = 0.0;
  double E0 = 0.0;
  int degeneracy = 0;
  std::vector<int> parities;
  double gap = 0.0;
  double residual_plus = 0.0;   // |(H - E0) A+> norm
  double residual_minus = 0.0;  // |(H - E0) A->
  double ff_residual = 0.0;     // max per-term annihilation residual
};

// 2 <= L <= 12
KstReport kst_build_and_verify(int L, double w, double delta, double K);

struct KstPathReport {
  double identity_residual = 0.0;    // h_j(alpha,t) vs Q-form, entrywise
  double q_annihilation = 0.0;       // max |Q psi0|, |Q* psi0|
  double monotone_min_eig = 0.0;     // min eig of H(0,t) - H(0,0)
  std::vector<int> stage_parities;   // four stage endpoints
  std::vector<double> stage_E0;
  std::vector<double> gap_grid;      // gap along t in [0, 2K] at alpha = 0
  bool spectra_match_t2k = false;    // even L only
};

KstPathReport kst_path_check(int L, double K, int t_points = 9);

struct MartingaleReport {
  double commutator_max = 0.0;   // max norm of [E_n, g_{n+1}]
  double sandwich_max = 0.0;     // max norm of E_n g_{n+1} E_n
  double lower_bound_min = 0.0;  // min eig of h_n - gamma (1 - g_n)
  double gap = 0.0;              // ED gap of the full chain
};

MartingaleReport martingale_identities(int L, const Vec& w,
                                       bool closed = false);

}  // namespace chainz2
