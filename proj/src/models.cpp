#include "chainz2/models.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace chainz2 {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct QuadraticAccum {
  CMat h;  // coefficient of a_p* a_q
  CMat p;  // antisymmetric pairing block
  explicit QuadraticAccum(int n) : h(CMat::Zero(n, n)), p(CMat::Zero(n, n)) {}
  // t a_p* a_q + conj(t) a_q* a_p
  void hop(int pp, int qq, cplx t) {
    h(pp, qq) += t;
    h(qq, pp) += std::conj(t);
  }
  // d a_p a_q + conj(d) a_q* a_p*
  void pair(int pp, int qq, cplx d) {
    p(qq, pp) += std::conj(d);
    p(pp, qq) -= std::conj(d);
  }
  // mu (n_p - 1/2)
  void chem(int pp, double mu) { h(pp, pp) += mu; }
  CMat bdg() const {
    const int n = static_cast<int>(h.rows());
    CMat full(2 * n, 2 * n);
    full.topLeftCorner(n, n) = h;
    full.topRightCorner(n, n) = p;
    full.bottomLeftCorner(n, n) = p.adjoint();
    full.bottomRightCorner(n, n) = -h.conjugate();
    return full;
  }
};

}  // namespace

ChainSpec ChainSpec::uniform(int L, Boundary b, double w, double mu,
                             double delta_mag, double delta_phase,
                             double quartic_K, double alpha) {
  ChainSpec s;
  s.L = L;
  s.boundary = b;
  s.alpha = alpha;
  const int nb = (b == Boundary::open) ? L - 1 : L;
  s.w = Vec::Constant(std::max(nb, 0), w);
  s.mu = Vec::Constant(L, mu);
  s.delta_phase = delta_phase;
  if (delta_mag >= 0.0)
    s.delta_mag = Vec::Constant(std::max(nb, 0), delta_mag);
  s.quartic_K = quartic_K;
  return s;
}

int ChainSpec::bonds() const {
  return boundary == Boundary::open ? L - 1 : L;
}

Vec ChainSpec::deltas() const {
  if (delta_mag.size() > 0) return delta_mag;
  return w;
}

void ChainSpec::validate() const {
  if (L <= 0) throw ConfigError("chain length must be positive");
  const int nb = bonds();
  if (static_cast<int>(w.size()) != nb)
    throw ConfigError("bond coupling vector has wrong length");
  if (static_cast<int>(mu.size()) != L)
    throw ConfigError("chemical potential vector has wrong length");
  if (delta_mag.size() > 0 && static_cast<int>(delta_mag.size()) != nb)
    throw ConfigError("pairing magnitude vector has wrong length");
}

BdGMatrix build_bdg(const ChainSpec& spec) {
  spec.validate();
  if (spec.quartic_K != 0.0)
    throw QuarticNotQuadratic("quartic coupling present, use the Fock engine");
  const int L = spec.L;
  const Vec dm = spec.deltas();
  const cplx eph = std::exp(cplx(0.0, spec.delta_phase));
  QuadraticAccum acc(L);
  for (int j = 0; j < L; ++j) acc.chem(j, spec.mu(j));
  const int nb = spec.bonds();
  for (int b = 0; b < nb; ++b) {
    const int pnt = b;
    const int qnt = (b + 1) % L;
    const cplx d0 = dm(b) * eph;
    cplx t = -spec.w(b);
    cplx d = d0;
    const bool closing = (spec.boundary != ChainSpec::Boundary::open && b == L - 1);
    if (closing) {
      double a = 0.0;
      if (spec.boundary == ChainSpec::Boundary::antiperiodic)
        a = kPi;
      else if (spec.boundary == ChainSpec::Boundary::flux ||
               spec.boundary == ChainSpec::Boundary::two_cell_flux)
        a = spec.alpha;
      const cplx ph = std::exp(cplx(0.0, a));
      t *= ph;
      d *= ph;
    } else if (spec.boundary == ChainSpec::Boundary::two_cell_flux && b == 0) {
      // counter-oriented phase on the first bond, so the flux threads
      // only the two cells adjacent to site 1
      const cplx ph = std::exp(cplx(0.0, spec.alpha));
      t *= std::conj(ph);
      d *= ph;
    }
    acc.hop(pnt, qnt, t);
    acc.pair(pnt, qnt, d);
  }
  return BdGMatrix(acc.bdg());
}

BdGMatrix build_double_sided(const ChainSpec& spec) {
  // spec.L is the half width; sites are -L..L stored as 0..2L
  const int half = spec.L;
  const int n = 2 * half + 1;
  if (static_cast<int>(spec.w.size()) != n - 1)
    throw ConfigError("double-sided chain needs 2L bond couplings");
  if (static_cast<int>(spec.mu.size()) != n)
    throw ConfigError("double-sided chain needs 2L+1 site potentials");
  Vec dm = spec.delta_mag.size() > 0 ? spec.delta_mag : spec.w;
  if (static_cast<int>(dm.size()) != n - 1)
    throw ConfigError("double-sided chain needs 2L bond pairings");
  const cplx eph = std::exp(cplx(0.0, spec.delta_phase));
  QuadraticAccum acc(n);
  for (int j = 0; j < n; ++j) acc.chem(j, spec.mu(j));
  for (int b = 0; b < n - 1; ++b) {
    cplx t = -spec.w(b);
    cplx d = dm(b) * eph;
    if (spec.boundary == ChainSpec::Boundary::flux && b == half) {
      // flux on the designated bond between sites 0 and 1
      const cplx ph = std::exp(cplx(0.0, spec.alpha));
      t *= ph;
      d *= ph;
    }
    acc.hop(b, b + 1, t);
    acc.pair(b, b + 1, d);
  }
  return BdGMatrix(acc.bdg());
}

std::vector<InteractionTerm> build_terms(const ChainSpec& spec) {
  spec.validate();
  const int L = spec.L;
  const Vec dm = spec.deltas();
  const cplx eph = std::exp(cplx(0.0, spec.delta_phase));
  std::vector<InteractionTerm> terms;
  for (int j = 0; j < L; ++j)
    if (spec.mu(j) != 0.0) terms.push_back(InteractionTerm::chem(j, spec.mu(j)));
  const int nb = spec.bonds();
  for (int b = 0; b < nb; ++b) {
    const int pnt = b;
    const int qnt = (b + 1) % L;
    const bool wrap = (spec.boundary != ChainSpec::Boundary::open && b == L - 1);
    cplx t = -spec.w(b);
    cplx d = dm(b) * eph;
    if (wrap) {
      double a = 0.0;
      if (spec.boundary == ChainSpec::Boundary::antiperiodic)
        a = kPi;
      else if (spec.boundary == ChainSpec::Boundary::flux ||
               spec.boundary == ChainSpec::Boundary::two_cell_flux)
        a = spec.alpha;
      const cplx ph = std::exp(cplx(0.0, a));
      t *= ph;
      d *= ph;
    } else if (spec.boundary == ChainSpec::Boundary::two_cell_flux && b == 0) {
      const cplx ph = std::exp(cplx(0.0, spec.alpha));
      t *= std::conj(ph);
      d *= ph;
    }
    if (t != cplx(0.0, 0.0)) {
      InteractionTerm ht = InteractionTerm::hop(pnt, qnt, t);
      ht.wrap = wrap;
      terms.push_back(ht);
    }
    if (d != cplx(0.0, 0.0)) {
      InteractionTerm pt = InteractionTerm::pair(pnt, qnt, d);
      pt.wrap = wrap;
      terms.push_back(pt);
    }
    if (spec.quartic_K != 0.0) {
      InteractionTerm qt =
          InteractionTerm::density_density(pnt, qnt, spec.quartic_K);
      qt.wrap = wrap;
      terms.push_back(qt);
    }
  }
  return terms;
}

BandStructure band_structure(double w, double mu, double delta, int k_points) {
  BandStructure out;
  out.k_grid.resize(k_points);
  out.band = Vec::Zero(k_points);
  double mn = std::numeric_limits<double>::infinity();
  for (int i = 0; i < k_points; ++i) {
    const double k = -kPi + 2.0 * kPi * i / k_points;
    out.k_grid[i] = k;
    const double xi = 2.0 * w * std::cos(k) - mu;
    const double pr = 2.0 * delta * std::sin(k);
    const double e = std::sqrt(xi * xi + pr * pr);
    out.band(i) = e;
    mn = std::min(mn, e);
  }
  out.min_gap = mn;
  return out;
}

BandStructure band_structure_xy(double w, double mu, double rho, int k_points) {
  // the spin-chain couplings land on a Kitaev chain with hopping w,
  // pairing rho*w and chemical potential 4*mu*w
  return band_structure(w, 4.0 * mu * w, rho * w, k_points);
}

namespace {

struct ThetaEval {
  int sign = 1;
  double hs = 0.0;
  double count = 0.0;
};

ThetaEval theta_eval(double w, double mu, double delta, double delta_phase,
                     int lt, double tol) {
  const int n = 2 * lt + 1;
  ChainSpec s = ChainSpec::uniform(n, ChainSpec::Boundary::open, w, mu, delta,
                                   delta_phase);
  const BdGMatrix h = build_bdg(s);
  const SkewMatrix a = majorana_form(h, 0.0);
  const Mat j = flatten(a, 1e-8, true).j;

  Vec theta(2 * n);
  for (int p = 0; p < n; ++p) {
    const double v = (p <= lt) ? -1.0 : 1.0;  // sites -lt..0 are flipped
    theta(p) = v;
    theta(n + p) = v;
  }
  Mat d = j;
  for (int r = 0; r < 2 * n; ++r)
    for (int c = 0; c < 2 * n; ++c) d(r, c) += theta(r) * j(r, c) * theta(c);

  Eigen::SelfAdjointEigenSolver<CMat> es(cplx(0.0, 1.0) * d.cast<cplx>());
  const Vec ev = es.eigenvalues();
  const CMat u = es.eigenvectors();
  const double nrm = ev.cwiseAbs().maxCoeff();
  const double cut = tol * std::max(nrm, 1.0);

  // wall-localized near-kernel weight; edge artifacts of the open
  // truncation carry their weight outside the window and drop out
  const int window = lt / 2;
  double trace = 0.0;
  for (int k = 0; k < 2 * n; ++k) {
    if (std::abs(ev(k)) >= cut) continue;
    double wt = 0.0;
    for (int p = 0; p < 2 * n; ++p) {
      const int site = (p % n) - lt;
      if (std::abs(site) <= window) wt += std::norm(u(p, k));
    }
    trace += wt;
  }
  ThetaEval out;
  out.count = trace;
  const int cnt = static_cast<int>(std::lround(trace));
  out.sign = ((cnt / 2) % 2 == 0) ? 1 : -1;

  Eigen::SelfAdjointEigenSolver<CMat> eh(h.matrix());
  const Vec hv = eh.eigenvalues();
  const CMat hu = eh.eigenvectors();
  const double hscale = std::max(hv.cwiseAbs().maxCoeff(), 1.0);
  CMat e = CMat::Zero(2 * n, 2 * n);
  for (int k = 0; k < 2 * n; ++k)
    if (hv(k) > 1e-12 * hscale) e += hu.col(k) * hu.col(k).adjoint();
  CMat de = e;
  for (int r = 0; r < 2 * n; ++r)
    for (int c = 0; c < 2 * n; ++c) de(r, c) -= theta(r) * e(r, c) * theta(c);
  out.hs = de.norm();
  return out;
}

}  // namespace

Z2Report theta_minus_index(const ChainSpec& uniform_spec, int L_trunc,
                           double tol) {
  if (uniform_spec.w.size() == 0 || uniform_spec.mu.size() == 0)
    throw ConfigError("theta index needs a translation-invariant chain");
  const double w = uniform_spec.w(0);
  const double mu = uniform_spec.mu(0);
  const Vec dm = uniform_spec.deltas();
  const double delta = dm.size() > 0 ? dm(0) : w;
  const ThetaEval e0 =
      theta_eval(w, mu, delta, uniform_spec.delta_phase, L_trunc, tol);
  const ThetaEval e1 =
      theta_eval(w, mu, delta, uniform_spec.delta_phase, L_trunc + 4, tol);
  Z2Report rep;
  rep.tol = tol;
  rep.sign = e0.sign;
  rep.sign_next = e1.sign;
  rep.hs_norm = e0.hs;
  rep.hs_norm_next = e1.hs;
  // a gapless bulk band leaves the truncated label resting on the kernel
  // completion convention, so it never stabilizes into a phase label; edge
  // zero modes of a gapped bulk are fine, their weight sits off the wall
  const BandStructure bs = band_structure(w, mu, delta, 1024);
  rep.gap = bs.min_gap;
  const bool bulk_gapless = bs.min_gap <= 1e-8 * std::max(1.0, bs.band.maxCoeff());
  rep.non_stabilized = (e0.sign != e1.sign) || bulk_gapless;
  rep.kernel_counts = {static_cast<int>(std::lround(e0.count)),
                       static_cast<int>(std::lround(e1.count))};
  return rep;
}

namespace {

CMat kw_unitary(int L) {
  Mat s = Mat::Zero(L, L);
  for (int j = 0; j + 1 < L; ++j) s(j + 1, j) = 1.0;
  const Mat id = Mat::Identity(L, L);
  CMat w(2 * L, 2 * L);
  const cplx ih(0.0, 0.5);
  w.topLeftCorner(L, L) = ih * (id + s);
  w.topRightCorner(L, L) = ih * cplx(0.0, 1.0) * (id - s);
  w.bottomLeftCorner(L, L) = ih * cplx(0.0, 1.0) * (id - s);
  w.bottomRightCorner(L, L) = -ih * (id + s);
  return w;
}

double kw_commutator_hs(int L) {
  const CMat w = kw_unitary(L);
  CMat z = CMat::Zero(2 * L, 2 * L);
  z.topLeftCorner(L, L) = cplx(0.0, -1.0) * Mat::Identity(L, L);
  z.bottomRightCorner(L, L) = cplx(0.0, 1.0) * Mat::Identity(L, L);
  return (z * w - w * z).norm();
}

}  // namespace

KwReport kramers_wannier_check(int L_trunc, double mu) {
  const int L = L_trunc;
  const CMat w = kw_unitary(L);
  CMat trivial = CMat::Zero(2 * L, 2 * L);
  trivial.topLeftCorner(L, L) = -mu * Mat::Identity(L, L);
  trivial.bottomRightCorner(L, L) = mu * Mat::Identity(L, L);
  const CMat mapped = w * trivial * w.adjoint();
  ChainSpec ks = ChainSpec::uniform(L, ChainSpec::Boundary::open, mu / 2.0, 0.0,
                                    mu / 2.0, -kPi / 2.0);
  const CMat target = build_bdg(ks).matrix();
  CMat resid = mapped - target;
  // mask the two boundary sites in both blocks
  double mx = 0.0;
  for (int r = 0; r < 2 * L; ++r) {
    const int rs = r % L;
    if (rs == 0 || rs == L - 1) continue;
    for (int c = 0; c < 2 * L; ++c) {
      const int cs = c % L;
      if (cs == 0 || cs == L - 1) continue;
      mx = std::max(mx, std::abs(resid(r, c)));
    }
  }
  KwReport rep;
  rep.map_residual = mx;
  rep.hs_small = kw_commutator_hs(L_trunc);
  rep.hs_big = kw_commutator_hs(4 * L_trunc);
  rep.ratio = rep.hs_big / std::max(rep.hs_small, 1e-300);
  return rep;
}

}  // namespace chainz2
