#include "chainz2/selftest.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <iterator>
#include <random>
#include <sstream>
#include <vector>

#include "chainz2/bdg.hpp"
#include "chainz2/fock.hpp"
#include "chainz2/jordan_wigner.hpp"
#include "chainz2/models.hpp"
#include "chainz2/skew.hpp"
#include "chainz2/z2flow.hpp"

namespace chainz2::selftest {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

struct Check {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (detail.tellp() > 0) detail << "; ";
      detail << what;
    }
  }
  CriterionResult done(const std::string& name, const std::string& ok_note) {
    CriterionResult r;
    r.name = name;
    r.pass = pass;
    r.detail = pass ? ok_note : detail.str();
    return r;
  }
};

Mat random_skew(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat m(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) m(r, c) = g(rng);
  return 0.5 * (m - m.transpose());
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = a + (b - a) * i / (n - 1);
  return g;
}

// additive quadratic spectrum {shift + sum of chosen modes}, sorted
Vec additive_spectrum(const Vec& modes, double shift) {
  const int L = static_cast<int>(modes.size());
  const std::size_t combos = std::size_t(1) << L;
  Vec out(combos);
  for (std::size_t s = 0; s < combos; ++s) {
    double e = shift;
    for (int k = 0; k < L; ++k)
      if ((s >> k) & 1u) e += modes(k);
    out(s) = e;
  }
  std::sort(out.data(), out.data() + combos);
  return out;
}

}  // namespace

CriterionResult pfaffian_identities(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> half(1, 8);
  Check c;
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 * half(rng);
    const SkewMatrix a(random_skew(n, rng));
    const double pf = pfaffian(a);
    const double det = a.entries().determinant();
    const double err = std::abs(pf * pf - det) / std::max(1.0, std::abs(det));
    worst = std::max(worst, err);
    c.require(err <= 1e-9, "pf^2 vs det error " + fmt(err) + " at n=" + std::to_string(n));
    if (!c.pass) break;
  }
  for (int trial = 0; trial < 50 && c.pass; ++trial) {
    const int n = 2 * half(rng);
    const SkewMatrix a(random_skew(n, rng));
    std::normal_distribution<double> g(0.0, 1.0);
    Mat v(n, n);
    for (int r = 0; r < n; ++r)
      for (int col = 0; col < n; ++col) v(r, col) = g(rng);
    const double dv = v.determinant();
    if (std::abs(dv) < 1e-8) continue;
    const SkewMatrix b(v * a.entries() * v.transpose());
    const int lhs = pfaffian(b) >= 0 ? 1 : -1;
    const int rhs = ((dv >= 0 ? 1 : -1) * (pfaffian(a) >= 0 ? 1 : -1));
    c.require(lhs == rhs, "congruence sign law failed at n=" + std::to_string(n));
  }
  return c.done("pfaffian_identities", "worst pf^2/det error " + fmt(worst));
}

CriterionResult kitaev_index_table() {
  Check c;
  for (int L = 2; L <= 8; ++L) {
    const auto triv = ChainSpec::uniform(L, ChainSpec::Boundary::periodic, 0.0, 1.0);
    const auto per = ChainSpec::uniform(L, ChainSpec::Boundary::periodic, 1.0, 0.0);
    const auto anti = ChainSpec::uniform(L, ChainSpec::Boundary::antiperiodic, 1.0, 0.0);
    const int s_triv = kitaev_index(build_bdg(triv)).sign;
    const int s_per = kitaev_index(build_bdg(per)).sign;
    const int s_anti = kitaev_index(build_bdg(anti)).sign;
    c.require(s_triv == 1, "trivial chain sign " + std::to_string(s_triv) + " at L=" + std::to_string(L));
    c.require(s_per == -1, "periodic sign " + std::to_string(s_per) + " at L=" + std::to_string(L));
    c.require(s_anti == 1, "anti-periodic sign " + std::to_string(s_anti) + " at L=" + std::to_string(L));
  }
  return c.done("kitaev_index_table", "signs +1/-1/+1 for L=2..8");
}

CriterionResult flux_spectral_flow() {
  Check c;
  std::string note;
  for (int L : {4, 6, 8}) {
    for (const bool two_cell : {false, true}) {
      const auto bnd = two_cell ? ChainSpec::Boundary::two_cell_flux : ChainSpec::Boundary::flux;
      auto sampler = [L, bnd](double alpha) {
        ChainSpec s = ChainSpec::uniform(L, bnd, 1.0, 0.0);
        s.alpha = alpha;
        return majorana_form(build_bdg(s));
      };
      HamiltonianPath path(sampler, linspace(0.0, kPi, 201));
      const Z2Report rep = sf2_path(path);
      const int ends = sf2_endpoints(sampler(0.0), sampler(kPi));
      c.require(ends == rep.sign, "endpoint/path disagreement at L=" + std::to_string(L));
      if (!two_cell) {
        c.require(rep.sign == -1, "single-bond flux sign " + std::to_string(rep.sign) + " at L=" + std::to_string(L));
        bool near = false;
        for (double x : rep.crossings) near = near || std::abs(x - kPi / 2.0) <= 0.05;
        c.require(near, "no crossing near pi/2 at L=" + std::to_string(L));
        if (!rep.crossings.empty() && L == 6) note = "L=6 crossing at " + fmt(rep.crossings.front());
      } else {
        c.require(rep.sign == 1, "two-cell flux sign " + std::to_string(rep.sign) + " at L=" + std::to_string(L));
        c.require(rep.crossings.empty(), "two-cell flux recorded a crossing at L=" + std::to_string(L));
      }
    }
  }
  return c.done("flux_spectral_flow", note);
}

CriterionResult open_chain_ground_structure(std::uint64_t seed) {
  Check c;
  for (int L = 2; L <= 10; ++L) {
    const auto spec = ChainSpec::uniform(L, ChainSpec::Boundary::open, 1.0, 0.0);
    const auto gs = ground_space(assemble(L, build_terms(spec)));
    c.require(gs.degeneracy == 2, "open degeneracy " + std::to_string(gs.degeneracy) + " at L=" + std::to_string(L));
    if (gs.degeneracy == 2) {
      std::vector<int> p = gs.parities;
      std::sort(p.begin(), p.end());
      c.require(p[0] == -1 && p[1] == 1, "open parities not {-1,+1} at L=" + std::to_string(L));
    }
    c.require(std::abs(gs.gap - 2.0) <= 1e-9, "open gap " + fmt(gs.gap) + " at L=" + std::to_string(L));
  }
  {
    const auto per = ChainSpec::uniform(6, ChainSpec::Boundary::periodic, 1.0, 0.0);
    const auto anti = ChainSpec::uniform(6, ChainSpec::Boundary::antiperiodic, 1.0, 0.0);
    const auto gp = ground_space(assemble(6, build_terms(per)));
    const auto ga = ground_space(assemble(6, build_terms(anti)));
    c.require(gp.degeneracy == 1 && gp.parities[0] == -1,
              "periodic L=6 not a unique odd ground state");
    c.require(ga.degeneracy == 1 && ga.parities[0] == 1,
              "anti-periodic L=6 not a unique even ground state");
  }
  // closed chain with generic bond signs: unique ground state whose parity
  // is minus the product of the coupling signs
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> mag(0.5, 1.5);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> len(4, 6);
  for (int trial = 0; trial < 20; ++trial) {
    const int L = len(rng);
    ChainSpec s = ChainSpec::uniform(L, ChainSpec::Boundary::periodic, 1.0, 0.0);
    int prod = 1;
    for (int b = 0; b < L; ++b) {
      const int sg = coin(rng) ? 1 : -1;
      prod *= sg;
      s.w(b) = sg * mag(rng);
    }
    const auto gs = ground_space(assemble(L, build_terms(s)));
    c.require(gs.degeneracy == 1, "signed-coupling chain degenerate at L=" + std::to_string(L));
    if (gs.degeneracy == 1)
      c.require(gs.parities[0] == -prod,
                "signed-coupling parity " + std::to_string(gs.parities[0]) + " vs expected " +
                    std::to_string(-prod));
  }
  return c.done("open_chain_ground_structure", "degeneracy 2, gap 2, parity rules hold");
}

CriterionResult quadratic_crosscheck(std::uint64_t seed) {
  Check c;
  std::mt19937_64 rng(seed ^ 0xc2b2ae3d27d4eb4fULL);
  std::uniform_int_distribution<int> len(2, 8);
  std::uniform_int_distribution<int> bnd(0, 2);
  std::uniform_real_distribution<double> cpl(-1.5, 1.5);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  double worst = 0.0;
  for (int trial = 0; trial < 30; ++trial) {
    const int L = len(rng);
    const auto boundary = std::array{ChainSpec::Boundary::open, ChainSpec::Boundary::periodic,
                                     ChainSpec::Boundary::antiperiodic}[bnd(rng)];
    ChainSpec s = ChainSpec::uniform(L, boundary, 1.0, 0.0);
    for (int b = 0; b < s.bonds(); ++b) s.w(b) = cpl(rng);
    s.delta_mag = Vec(s.bonds());
    for (int b = 0; b < s.bonds(); ++b) s.delta_mag(b) = cpl(rng);
    for (int j = 0; j < L; ++j) s.mu(j) = cpl(rng);
    s.delta_phase = phase(rng);

    const auto [trafo, modes] = bogoliubov_diagonalize(build_bdg(s));
    (void)trafo;
    const FockOperator h = assemble(L, build_terms(s));
    const CMat dense = CMat(h.op);
    Eigen::SelfAdjointEigenSolver<CMat> es(dense);
    const Vec ed = es.eigenvalues();
    const double shift = (dense.trace().real() - std::pow(2.0, L - 1) * modes.sum()) / std::pow(2.0, L);
    const Vec add = additive_spectrum(modes, shift);
    const double scale = std::max(1.0, ed.cwiseAbs().maxCoeff());
    const double err = (ed - add).cwiseAbs().maxCoeff() / scale;
    worst = std::max(worst, err);
    c.require(err <= 1e-9, "spectrum mismatch " + fmt(err) + " at L=" + std::to_string(L));
    if (!c.pass) break;
  }
  // engineered zero-mode cases: half the Majorana kernel dimension equals
  // the log2 of the many-body ground degeneracy
  struct ZeroCase {
    int L;
    std::vector<double> w;
  };
  const std::vector<ZeroCase> cases = {
      {2, {1}},          {3, {1, 1}},          {4, {1, 1, 1}},
      {4, {1, 0, 1}},    {5, {1, 1, 0, 1}},    {6, {1, 0, 1, 0, 1}},
      {3, {0, 0}},       {6, {1, 1, 1, 1, 1}}, {7, {1, 0, 1, 1, 0, 1}},
      {8, {1, 1, 1, 0, 1, 1, 1}}};
  for (const auto& zc : cases) {
    ChainSpec s = ChainSpec::uniform(zc.L, ChainSpec::Boundary::open, 1.0, 0.0);
    for (int b = 0; b < s.bonds(); ++b) s.w(b) = zc.w[b];
    const int kd = kernel_dim(majorana_form(build_bdg(s)));
    const auto gs = ground_space(assemble(zc.L, build_terms(s)));
    const double lg = std::log2(double(gs.degeneracy));
    c.require(std::abs(kd / 2.0 - lg) < 1e-12,
              "kernel " + std::to_string(kd) + " vs degeneracy " + std::to_string(gs.degeneracy) +
                  " at L=" + std::to_string(zc.L));
  }
  return c.done("quadratic_crosscheck", "worst spectrum error " + fmt(worst));
}

CriterionResult interacting_ff_chain() {
  Check c;
  const std::vector<std::array<double, 3>> triples = {{1.0, 0.5, 1.0}, {1.0, 0.0, 0.5}, {2.0, 1.0, 1.0}};
  for (const auto& [w, delta, K] : triples) {
    const double closed_form = 4.0 * std::sqrt(K * K + w * K + (w * w - delta * delta) / 4.0);
    for (int L = 3; L <= 8; ++L) {
      const KstReport rep = kst_build_and_verify(L, w, delta, K);
      c.require(std::abs(rep.mu_e - closed_form) <= 1e-12, "mu_e mismatch at L=" + std::to_string(L));
      c.require(rep.residual_plus < 1e-9 && rep.residual_minus < 1e-9,
                "product-state residual " + fmt(std::max(rep.residual_plus, rep.residual_minus)) +
                    " at L=" + std::to_string(L));
      c.require(rep.degeneracy == 2, "degeneracy " + std::to_string(rep.degeneracy) + " at L=" + std::to_string(L));
      std::vector<int> p = rep.parities;
      std::sort(p.begin(), p.end());
      c.require(p.size() == 2 && p[0] == -1 && p[1] == 1, "parities not opposite at L=" + std::to_string(L));
      c.require(rep.ff_residual < 1e-9, "per-term residual " + fmt(rep.ff_residual) + " at L=" + std::to_string(L));
      if (!c.pass) return c.done("interacting_ff_chain", "");
    }
  }
  for (const double K : {1.0, 0.5}) {
    for (int L = 3; L <= 8; ++L) {
      const KstPathReport rep = kst_path_check(L, K, 9);
      double mn = rep.gap_grid[0];
      for (double g : rep.gap_grid) mn = std::min(mn, g);
      c.require(mn >= rep.gap_grid[0] - 1e-9,
                "path gap dips to " + fmt(mn) + " below t=0 gap " + fmt(rep.gap_grid[0]) + " at L=" +
                    std::to_string(L) + " K=" + fmt(K));
      if (!c.pass) return c.done("interacting_ff_chain", "");
    }
  }
  return c.done("interacting_ff_chain", "exact ground pair, gap bounded along the deformation");
}

CriterionResult interacting_flux_endpoints() {
  Check c;
  const int L = 6;
  const double w = 1.0, delta = 1.0, K = 1.0;
  const auto sweep = flux_sweep(L, w, delta, K, linspace(0.0, kPi, 101));
  const auto& g0 = sweep.front();
  const auto& gpi = sweep.back();
  c.require(g0.degeneracy == 1 && g0.parities[0] == -1, "alpha=0 ground state not unique odd");
  c.require(gpi.degeneracy == 1 && gpi.parities[0] == 1, "alpha=pi ground state not unique even");
  double mn = g0.gap;
  for (const auto& r : sweep) mn = std::min(mn, r.gap);
  c.require(mn < 0.02 * g0.gap,
            "sweep gap minimum " + fmt(mn) + " vs endpoint gap " + fmt(g0.gap));
  return c.done("interacting_flux_endpoints",
                "gap " + fmt(g0.gap) + " at 0 closes to " + fmt(mn) + " inside the sweep");
}

CriterionResult xy_band_support() {
  Check c;
  for (const double rho : {0.25, 0.5, 1.0}) {
    const BandStructure bs = band_structure_xy(1.0, 0.0, rho, 2048);
    const double lo = bs.band.minCoeff();
    const double hi = bs.band.maxCoeff();
    c.require(std::abs(lo - 2.0 * rho) <= 1e-3,
              "lower band edge " + fmt(lo) + " vs " + fmt(2.0 * rho) + " at rho=" + fmt(rho));
    c.require(std::abs(hi - 2.0) <= 1e-3, "upper band edge " + fmt(hi) + " at rho=" + fmt(rho));
  }
  const BandStructure flat = band_structure_xy(2.0, 0.0, 1.0, 2048);
  const double dev =
      std::max(std::abs(flat.band.maxCoeff() - 4.0), std::abs(flat.band.minCoeff() - 4.0));
  c.require(dev <= 1e-10, "flat-band deviation " + fmt(dev));
  return c.done("xy_band_support", "support [2 rho, 2]; flat band ±4");
}

CriterionResult half_lattice_flip_index() {
  Check c;
  struct Point {
    double mu, rho;
    int expect;
  };
  // XY (mu, rho) lands on a Kitaev chain with couplings (1, rho, 4 mu)
  for (const Point pt : {Point{1.0, 0.5, 1}, Point{0.0, 0.5, -1}, Point{0.0, 1.0, -1}}) {
    const ChainSpec s =
        ChainSpec::uniform(3, ChainSpec::Boundary::open, 1.0, 4.0 * pt.mu, pt.rho);
    const Z2Report r24 = theta_minus_index(s, 24);
    const Z2Report r28 = theta_minus_index(s, 28);
    c.require(r24.sign == pt.expect, "index " + std::to_string(r24.sign) + " at (mu,rho)=(" +
                                         fmt(pt.mu) + "," + fmt(pt.rho) + ")");
    c.require(r24.sign == r28.sign, "truncation 24 vs 28 disagree at rho=" + fmt(pt.rho));
  }
  const ChainSpec s00 = ChainSpec::uniform(3, ChainSpec::Boundary::open, 1.0, 0.0, 0.0);
  const Z2Report g24 = theta_minus_index(s00, 24);
  const Z2Report g48 = theta_minus_index(s00, 48);
  c.require(g24.non_stabilized, "gapless point did not raise the non-stabilized flag (sign " +
                                    std::to_string(g24.sign) + " at both truncations)");
  const double growth = (g48.hs_norm - g24.hs_norm) / std::max(g24.hs_norm, 1e-300);
  c.require(growth >= 0.20, "flip-defect HS norm grew " + fmt(100.0 * growth) + "% (" +
                                fmt(g24.hs_norm) + " -> " + fmt(g48.hs_norm) +
                                "), below the 20% threshold");
  return c.done("half_lattice_flip_index", "signs stable, gapless point flagged");
}

CriterionResult relative_index_flux() {
  Check c;
  for (const int half : {8, 12}) {
    const int n = 2 * half + 1;
    ChainSpec topo = ChainSpec::uniform(n, ChainSpec::Boundary::flux, 1.0, 0.0);
    topo.L = half;
    topo.w = Vec::Constant(n - 1, 1.0);
    topo.mu = Vec::Zero(n);
    ChainSpec triv = topo;
    triv.w = Vec::Zero(n - 1);
    triv.mu = Vec::Constant(n, 1.0);
    for (ChainSpec* sp : {&topo, &triv}) {
      ChainSpec s0 = *sp;
      s0.alpha = 0.0;
      ChainSpec s1 = *sp;
      s1.alpha = kPi;
      const Z2Report rep =
          relative_index(build_double_sided(s0), build_double_sided(s1), 1e-8, true);
      const int expect = (sp == &topo) ? -1 : 1;
      c.require(rep.sign == expect, std::string(sp == &topo ? "topological" : "trivial") +
                                        " flux pair sign " + std::to_string(rep.sign) +
                                        " at half width " + std::to_string(half));
    }
  }
  return c.done("relative_index_flux", "flux flip detected only in the topological phase");
}

CriterionResult martingale_structure(std::uint64_t seed) {
  Check c;
  std::mt19937_64 rng(seed ^ 0xa0761d6478bd642fULL);
  std::uniform_real_distribution<double> mag(0.5, 1.5);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> closed_len(3, 6);
  std::uniform_int_distribution<int> half_len(1, 2);
  for (int trial = 0; trial < 10; ++trial) {
    const bool closed = trial < 5;
    const int L = closed ? closed_len(rng) : half_len(rng);
    const int nb = closed ? L : 2 * L;
    Vec w(nb);
    for (int b = 0; b < nb; ++b) w(b) = (coin(rng) ? 1.0 : -1.0) * mag(rng);
    const MartingaleReport rep = martingale_identities(L, w, closed);
    c.require(rep.commutator_max <= 1e-10, "commutator norm " + fmt(rep.commutator_max));
    c.require(rep.sandwich_max <= 1e-10, "sandwich norm " + fmt(rep.sandwich_max));
    c.require(rep.lower_bound_min >= -1e-10,
              "local bound violated by " + fmt(-rep.lower_bound_min));
  }
  for (int L = 3; L <= 10; ++L) {
    const auto spec = ChainSpec::uniform(L, ChainSpec::Boundary::periodic, 1.0, 0.0);
    const auto gs = ground_space(assemble(L, build_terms(spec)));
    c.require(std::abs(gs.gap - 2.0) <= 1e-9,
              "closed-chain gap " + fmt(gs.gap) + " at L=" + std::to_string(L));
  }
  return c.done("martingale_structure", "projector identities hold, gap constant at 2");
}

CriterionResult spin_chain_equivalence(std::uint64_t seed) {
  Check c;
  for (int L = 4; L <= 7; ++L) {
    // transverse-field Ising image of the Kitaev chain
    std::vector<InteractionTerm> ising;
    const double jx = 0.8, mu = 0.6;
    for (int j = 0; j + 1 < L; ++j) {
      ising.push_back(InteractionTerm::hop(j, j + 1, -jx));
      ising.push_back(InteractionTerm::pair(j, j + 1, jx));
    }
    for (int j = 0; j < L; ++j) ising.push_back(InteractionTerm::chem(j, mu));
    const CMat fermi = CMat(assemble(L, ising).op);
    const CMat spin = spin_matrix(jw_forward(L, ising));
    const double d1 = (fermi - spin).cwiseAbs().maxCoeff();
    c.require(d1 <= 1e-12, "Ising image mismatch " + fmt(d1) + " at L=" + std::to_string(L));

    // XYZ image of hopping + pairing + density-density bonds
    const double w = 1.3, delta = 0.4, K = 0.7;
    std::vector<InteractionTerm> xyz;
    for (int j = 0; j + 1 < L; ++j) {
      xyz.push_back(InteractionTerm::hop(j, j + 1, -w));
      xyz.push_back(InteractionTerm::pair(j, j + 1, delta));
      xyz.push_back(InteractionTerm::density_density(j, j + 1, K));
    }
    const CMat fermi2 = CMat(assemble(L, xyz).op);
    const SpinHamiltonian h2 = jw_forward(L, xyz);
    const double d2 = (fermi2 - spin_matrix(h2)).cwiseAbs().maxCoeff();
    c.require(d2 <= 1e-12, "XYZ image mismatch " + fmt(d2) + " at L=" + std::to_string(L));
    // bond couplings must come out as -(w+delta)/2, -(w-delta)/2, +K
    for (const auto& t : normalized(h2).terms) {
      if (t.letters.size() != 2) continue;
      const char a = t.letters.begin()->second;
      const char b = std::next(t.letters.begin())->second;
      if (a != b) continue;
      const double expect = (a == 'X') ? -(w + delta) / 2.0 : (a == 'Y') ? -(w - delta) / 2.0 : K;
      c.require(std::abs(t.coeff - cplx(expect, 0.0)) <= 1e-12,
                std::string("bond coupling ") + a + a + " off by " +
                    fmt(std::abs(t.coeff - cplx(expect, 0.0))));
    }
  }

  std::mt19937_64 rng(seed ^ 0xe7037ed1a0b428dbULL);
  std::uniform_int_distribution<int> len(3, 7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int L = len(rng);
    std::uniform_int_distribution<int> site(0, L - 1);
    std::vector<InteractionTerm> terms;
    const int nterms = 1 + (trial % 4);
    for (int t = 0; t < nterms; ++t) {
      const int j = site(rng);
      int k = site(rng);
      if (k == j) k = (j + 1) % L;
      switch (trial % 5) {
        case 0: terms.push_back(InteractionTerm::hop(j, k, cplx(u(rng), u(rng)))); break;
        case 1: terms.push_back(InteractionTerm::pair(j, k, cplx(u(rng), u(rng)))); break;
        case 2: terms.push_back(InteractionTerm::chem(j, u(rng))); break;
        case 3: terms.push_back(InteractionTerm::density_density(j, k, u(rng))); break;
        default: {
          std::vector<std::pair<int, bool>> mono = {{j, true}, {k, false}, {site(rng), true}, {site(rng), false}};
          terms.push_back(InteractionTerm::raw(cplx(u(rng), u(rng)), mono));
          break;
        }
      }
    }
    const SpinHamiltonian h = jw_forward(L, terms);
    const SpinHamiltonian back = jw_forward(L, jw_inverse(h));
    const SpinHamiltonian lhs = normalized(h);
    const SpinHamiltonian rhs = normalized(back);
    bool same = lhs.terms.size() == rhs.terms.size();
    for (std::size_t i = 0; same && i < lhs.terms.size(); ++i)
      same = lhs.terms[i].letters == rhs.terms[i].letters &&
             std::abs(lhs.terms[i].coeff - rhs.terms[i].coeff) <= 1e-12;
    c.require(same, "round trip drifted on trial " + std::to_string(trial));
    if (!c.pass) break;
  }
  return c.done("spin_chain_equivalence", "fermionic and spin matrices agree entrywise");
}

std::vector<CriterionResult> run_all(std::uint64_t seed) {
  return {pfaffian_identities(seed),
          kitaev_index_table(),
          flux_spectral_flow(),
          open_chain_ground_structure(seed),
          quadratic_crosscheck(seed),
          interacting_ff_chain(),
          interacting_flux_endpoints(),
          xy_band_support(),
          half_lattice_flip_index(),
          relative_index_flux(),
          martingale_structure(seed),
          spin_chain_equivalence(seed)};
}

}  // namespace chainz2::selftest
