#pragma once

#include <vector>

#include "chainz2/bdg.hpp"
#include "chainz2/fock.hpp"
#include "chainz2/z2report.hpp"

namespace chainz2 {

// chain description; closed boundaries carry L bonds, open L-1.
// flux places phases on the closing bond (sites L -> 1); for the
// double-sided builder it sits on the bond 0 -> 1.
struct ChainSpec {
  enum class Boundary { open, periodic, antiperiodic, flux, two_cell_flux };
  int L = 0;
  Boundary boundary = Boundary::open;
  double alpha = 0.0;
  Vec w;               // per bond
  Vec mu;              // per site
  double delta_phase = 0.0;
  Vec delta_mag;       // per bond; empty means equal to w
  double quartic_K = 0.0;

  static ChainSpec uniform(int L, Boundary b, double w, double mu,
                           double delta_mag = -1.0, double delta_phase = 0.0,
                           double quartic_K = 0.0, double alpha = 0.0);
  int bonds() const;
  Vec deltas() const;  // resolved magnitudes
  void validate() const;
};

BdGMatrix build_bdg(const ChainSpec& spec);

// sites -L..L; open ends, optional flux on the bond 0 -> 1
BdGMatrix build_double_sided(const ChainSpec& spec);

// interaction list for the Fock engine (any boundary, quartic allowed)
std::vector<InteractionTerm> build_terms(const ChainSpec& spec);

struct BandStructure {
  std::vector<double> k_grid;
  Vec band;  // non-negative branch; spectrum is +-band(k)
  double min_gap = 0.0;
};

// Bloch bands E(k) = sqrt((2 w cos k - mu)^2 + 4 delta^2 sin^2 k)
BandStructure band_structure(double w, double mu, double delta, int k_points);
// couplings (1 +- rho) on the spin side: Kitaev(w, rho w, 4 mu w)
BandStructure band_structure_xy(double w, double mu, double rho, int k_points);

// truncated half-lattice flip index on [-L_trunc, L_trunc]; counts the
// wall-localized kernel of J + theta J theta and records stabilization
// against L_trunc + 4; non_stabilized raises when the sign flips between
// the truncations or when the bulk band is gapless, since the truncated
// label then rests on a kernel completion rather than on the model
Z2Report theta_minus_index(const ChainSpec& uniform_spec, int L_trunc,
                           double tol = 1e-3);

struct KwReport {
  double map_residual = 0.0;  // W diag(-mu,mu) W^* vs Kitaev(0, mu/2), bulk
  double hs_small = 0.0;      // HS norm of [J_triv, W] at L
  double hs_big = 0.0;        // at 4L
  double ratio = 0.0;
};

KwReport kramers_wannier_check(int L_trunc, double mu = 1.0);

}  // namespace chainz2
