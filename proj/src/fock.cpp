#include "chainz2/fock.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <exception>
#include <random>
#include <vector>

#include "chainz2/par.hpp"

#ifdef CHAINZ2_OPENMP
#include <omp.h>
#endif

namespace chainz2 {

namespace {

constexpr double kPi = 3.14159265358979323846;

double sp_max_abs(const SpMat& m) {
  double worst = 0.0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      worst = std::max(worst, std::abs(it.value()));
  return worst;
}

// parity of the occupied sites below bit j, fixes every matrix element
int jw_sign(std::uint32_t state, int j) {
  std::uint32_t lower = state & ((1u << j) - 1u);
  return (std::popcount(lower) % 2 == 0) ? 1 : -1;
}

SpMat annihilator(int L, int j) {
  const std::uint32_t dim = 1u << L;
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(dim / 2);
  for (std::uint32_t s = 0; s < dim; ++s)
    if (s & (1u << j))
      trip.emplace_back(static_cast<int>(s ^ (1u << j)), static_cast<int>(s),
                        cplx(static_cast<double>(jw_sign(s, j)), 0.0));
  SpMat m(dim, dim);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

SpMat diag_op(int L, const std::function<double(std::uint32_t)>& f) {
  const std::uint32_t dim = 1u << L;
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(dim);
  for (std::uint32_t s = 0; s < dim; ++s) {
    double v = f(s);
    if (v != 0.0) trip.emplace_back(static_cast<int>(s), static_cast<int>(s), cplx(v, 0.0));
  }
  SpMat m(dim, dim);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

void check_car_pair(const FockGenerators& g, int j, int k) {
  SpMat acc = (g.a[j] * g.a[k] + g.a[k] * g.a[j]).pruned();
  if (sp_max_abs(acc) > 1e-12) throw Error("fock_generators: CAR {a_j, a_k} violated");
  SpMat mix = g.a[j] * g.ad[k] + g.ad[k] * g.a[j];
  if (j == k) {
    SpMat id(mix.rows(), mix.cols());
    id.setIdentity();
    mix = mix - id;
  }
  if (sp_max_abs(mix) > 1e-12) throw Error("fock_generators: CAR {a_j, a_k*} violated");
}

struct DenseEig {
  Vec evals;
  CMat evecs;
};

DenseEig dense_eig(const SpMat& m) {
  CMat d(m);
  Eigen::SelfAdjointEigenSolver<CMat> es(d);
  return {es.eigenvalues(), es.eigenvectors()};
}

// eigenvector cluster at the bottom of the spectrum, parity-resolved
GroundSpaceReport cluster_report(int L, const Vec& evals, const CMat& evecs,
                                 double deg_tol_scale) {
  GroundSpaceReport rep;
  rep.E0 = evals(0);
  const double tol = deg_tol_scale * std::max(1.0, std::abs(rep.E0));
  int deg = 1;
  while (deg < evals.size() && evals(deg) < rep.E0 + tol) ++deg;
  rep.degeneracy = deg;
  rep.gap = (deg < evals.size()) ? evals(deg) - rep.E0 : 0.0;

  const std::uint32_t dim = 1u << L;
  Vec pdiag(dim);
  for (std::uint32_t s = 0; s < dim; ++s)
    pdiag(s) = (std::popcount(s) % 2 == 0) ? 1.0 : -1.0;

  CMat basis = evecs.leftCols(deg);
  CMat pk = basis.adjoint() * (pdiag.asDiagonal() * basis);
  Eigen::SelfAdjointEigenSolver<CMat> ps(pk);
  rep.states = basis * ps.eigenvectors();
  rep.parities.resize(deg);
  for (int i = 0; i < deg; ++i) {
    double p = ps.eigenvalues()(i);
    if (std::abs(std::abs(p) - 1.0) > 1e-6)
      throw Error("ground_space: ground vector is not a parity eigenvector");
    rep.parities[i] = (p > 0) ? 1 : -1;
  }
  return rep;
}

// Lanczos with full reorthogonalization restricted to one parity sector;
// the mask is reapplied every step so rounding cannot leak across sectors
struct RitzPair {
  double eval;
  CVec vec;
  int parity;
};

std::vector<RitzPair> lanczos_sector(const SpMat& h, int L, int sector_parity,
                                     int nev, std::uint64_t seed) {
  const std::uint32_t dim = 1u << L;
  std::vector<char> in_sector(dim);
  for (std::uint32_t s = 0; s < dim; ++s)
    in_sector[s] = ((std::popcount(s) % 2 == 0) ? 1 : -1) == sector_parity;

  auto mask = [&](CVec& v) {
    for (std::uint32_t s = 0; s < dim; ++s)
      if (!in_sector[s]) v(s) = cplx(0.0, 0.0);
  };

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  CVec v0(dim);
  for (std::uint32_t s = 0; s < dim; ++s) v0(s) = cplx(gauss(rng), gauss(rng));
  mask(v0);
  v0.normalize();

  const int max_steps = std::min<int>(static_cast<int>(dim), 300);
  CMat basis(dim, max_steps);
  std::vector<double> alpha, beta;
  basis.col(0) = v0;

  int m = 0;
  Eigen::SelfAdjointEigenSolver<Mat> tri_es;
  for (int j = 0; j < max_steps; ++j) {
    CVec w = par::spmv(h, basis.col(j));
    mask(w);
    alpha.push_back(basis.col(j).dot(w).real());
    w -= alpha[j] * basis.col(j);
    if (j > 0) w -= beta[j - 1] * basis.col(j - 1);
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i <= j; ++i) w -= basis.col(i).dot(w) * basis.col(i);
    m = j + 1;
    double b = w.norm();

    bool check_now = (m % 20 == 0) || (j + 1 == max_steps) || b < 1e-13;
    if (check_now && m >= nev) {
      Mat tri = Mat::Zero(m, m);
      for (int i = 0; i < m; ++i) tri(i, i) = alpha[i];
      for (int i = 0; i + 1 < m; ++i) tri(i, i + 1) = tri(i + 1, i) = beta[i];
      tri_es.compute(tri);
      bool done = true;
      for (int i = 0; i < nev; ++i) {
        double resid = b * std::abs(tri_es.eigenvectors()(m - 1, i));
        if (resid > 1e-10 * std::max(1.0, std::abs(tri_es.eigenvalues()(i))))
          done = false;
      }
      if (done || b < 1e-13 || j + 1 == max_steps) {
        if (!done && b >= 1e-13 && j + 1 == max_steps)
          throw Error("ground_space: Lanczos failed to converge");
        std::vector<RitzPair> out;
        for (int i = 0; i < nev && i < m; ++i) {
          CVec x = basis.leftCols(m) * tri_es.eigenvectors().col(i);
          x.normalize();
          out.push_back({tri_es.eigenvalues()(i), x, sector_parity});
        }
        return out;
      }
    }
    if (j + 1 < max_steps) {
      if (b < 1e-13) {
        // invariant subspace exhausted; restart a fresh block with beta = 0
        CVec r(dim);
        for (std::uint32_t s = 0; s < dim; ++s) r(s) = cplx(gauss(rng), gauss(rng));
        mask(r);
        for (int pass = 0; pass < 2; ++pass)
          for (int i = 0; i <= j; ++i) r -= basis.col(i).dot(r) * basis.col(i);
        double rn = r.norm();
        if (rn < 1e-13) throw Error("ground_space: sector exhausted before convergence");
        beta.push_back(0.0);
        basis.col(j + 1) = r / rn;
      } else {
        beta.push_back(b);
        basis.col(j + 1) = w / b;
      }
    }
  }
  throw Error("ground_space: Lanczos failed to converge");
}

GroundSpaceReport iterative_ground_space(const FockOperator& h, double deg_tol_scale) {
  const int nev = 4;
  auto even = lanczos_sector(h.op, h.L, +1, nev, 0x5eedULL);
  auto odd = lanczos_sector(h.op, h.L, -1, nev, 0x5eedULL ^ 0xffULL);
  std::vector<RitzPair> all;
  all.insert(all.end(), even.begin(), even.end());
  all.insert(all.end(), odd.begin(), odd.end());
  std::sort(all.begin(), all.end(),
            [](const RitzPair& x, const RitzPair& y) { return x.eval < y.eval; });

  GroundSpaceReport rep;
  rep.E0 = all[0].eval;
  const double tol = deg_tol_scale * std::max(1.0, std::abs(rep.E0));
  int deg = 1;
  while (deg < static_cast<int>(all.size()) && all[deg].eval < rep.E0 + tol) ++deg;
  if (deg + 1 >= static_cast<int>(all.size()))
    throw Error("ground_space: degeneracy exceeds the iterative window");
  rep.degeneracy = deg;
  rep.gap = all[deg].eval - rep.E0;
  rep.states.resize(h.op.rows(), deg);
  rep.parities.resize(deg);
  for (int i = 0; i < deg; ++i) {
    rep.states.col(i) = all[i].vec;
    rep.parities[i] = all[i].parity;
  }
  return rep;
}

std::vector<InteractionTerm> kst_bond_terms(int j, int k, cplx thop, cplx tpair,
                                            double K, double mu_e) {
  std::vector<InteractionTerm> out;
  out.push_back(InteractionTerm::hop(j, k, thop));
  out.push_back(InteractionTerm::pair(j, k, tpair));
  if (K != 0.0) out.push_back(InteractionTerm::density_density(j, k, K));
  out.push_back(InteractionTerm::chem(j, -0.5 * mu_e));
  out.push_back(InteractionTerm::chem(k, -0.5 * mu_e));
  out.push_back(InteractionTerm::constant(0.5 * mu_e));
  return out;
}

// bond term of the interpolation path at coupling t; flipped reverses the
// hopping and pairing signs, which realizes the pi flux on that bond
std::vector<InteractionTerm> path_bond_terms(int j, int k, double theta, double t,
                                             bool flipped) {
  const double s = flipped ? -1.0 : 1.0;
  std::vector<InteractionTerm> out;
  out.push_back(InteractionTerm::hop(j, k, cplx(-s, 0.0)));
  out.push_back(InteractionTerm::pair(j, k, cplx(s * (1.0 + t) * std::sin(theta), 0.0)));
  out.push_back(InteractionTerm::chem(j, (1.0 + t) * std::cos(theta)));
  out.push_back(InteractionTerm::chem(k, (1.0 + t) * std::cos(theta)));
  out.push_back(InteractionTerm::constant(-(1.0 + t) * std::cos(theta)));
  if (t != 0.0) out.push_back(InteractionTerm::density_density(j, k, 0.5 * t));
  out.push_back(InteractionTerm::constant(1.0 + 0.5 * t));
  return out;
}

// minimum eigenvalue of an adjacent-bond term, computed on two sites; the
// sign string between neighbouring sites is trivial so the reduction is exact
double adjacent_bond_min_eig(const std::vector<InteractionTerm>& terms, int j, int k) {
  std::vector<InteractionTerm> local;
  for (InteractionTerm t : terms) {
    t.j = (t.j == j) ? 0 : (t.j == k) ? 1 : t.j;
    t.k = (t.k == j) ? 0 : (t.k == k) ? 1 : t.k;
    local.push_back(t);
  }
  FockOperator two = assemble(2, local);
  return dense_eig(two.op).evals(0);
}

CVec product_state(const FockGenerators& g, double u, double v,
                   const std::vector<int>& signs) {
  const std::uint32_t dim = 1u << g.L;
  CVec psi = CVec::Zero(dim);
  psi(0) = cplx(1.0, 0.0);
  // highest site first, so every occupation amplitude carries ascending
  // creation operators with a positive sign
  for (int j = g.L - 1; j >= 0; --j)
    psi = u * psi + static_cast<double>(signs[j]) * v * (g.ad[j] * psi);
  psi.normalize();
  return psi;
}

SpMat sp_identity(std::uint32_t dim) {
  SpMat id(dim, dim);
  id.setIdentity();
  return id;
}

// Q operator whose bilinear combination reproduces the path bond term
SpMat path_q(const FockGenerators& g, int j, int k, double theta, bool pi_bond) {
  const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
  const SpMat id = sp_identity(1u << g.L);
  SpMat nj = g.ad[j] * g.a[j];
  SpMat nk = g.ad[k] * g.a[k];
  if (!pi_bond)
    return s * (-(g.ad[j] * (id - nk)) + g.ad[k] * (id - nj)) -
           c * (g.a[j] * nk + g.a[k] * nj);
  return s * (g.ad[j] * (id - nk) + g.ad[k] * (id - nj)) +
         c * (g.a[j] * nk - g.a[k] * nj);
}

Mat kernel_projector(const CMat& m, double tol_scale) {
  Eigen::SelfAdjointEigenSolver<CMat> es(m);
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  const double cut = tol_scale * std::max(1.0, top);
  CMat pk = CMat::Zero(m.rows(), m.cols());
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (std::abs(es.eigenvalues()(i)) < cut)
      pk += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
  Mat out = pk.real();
  if (pk.imag().cwiseAbs().maxCoeff() > 1e-10)
    throw Error("martingale: kernel projector is not real");
  return out;
}

}  // namespace

InteractionTerm InteractionTerm::hop(int j, int k, cplx t) {
  InteractionTerm out;
  out.kind = Kind::hop;
  out.j = j;
  out.k = k;
  out.coeff = t;
  return out;
}

InteractionTerm InteractionTerm::pair(int j, int k, cplx d) {
  InteractionTerm out;
  out.kind = Kind::pair;
  out.j = j;
  out.k = k;
  out.coeff = d;
  return out;
}

InteractionTerm InteractionTerm::chem(int j, double mu) {
  InteractionTerm out;
  out.kind = Kind::chem;
  out.j = j;
  out.k = j;
  out.coeff = cplx(mu, 0.0);
  return out;
}

InteractionTerm InteractionTerm::density_density(int j, int k, double K) {
  InteractionTerm out;
  out.kind = Kind::density_density;
  out.j = j;
  out.k = k;
  out.coeff = cplx(K, 0.0);
  return out;
}

InteractionTerm InteractionTerm::raw(cplx c, std::vector<std::pair<int, bool>> m) {
  InteractionTerm out;
  out.kind = Kind::raw;
  out.coeff = c;
  out.monomial = std::move(m);
  return out;
}

InteractionTerm InteractionTerm::constant(double c) {
  return raw(cplx(c, 0.0), {});
}

FockGenerators fock_generators(int L) {
  if (L < 1 || L > 14) throw ConfigError("fock_generators: L must lie in [1, 14]");
  FockGenerators g;
  g.L = L;
  g.a.reserve(L);
  g.ad.reserve(L);
  for (int j = 0; j < L; ++j) {
    g.a.push_back(annihilator(L, j));
    g.ad.push_back(SpMat(g.a[j].adjoint()));
  }
  g.b.reserve(2 * L);
  const cplx im(0.0, 1.0);
  for (int j = 0; j < L; ++j) {
    g.b.push_back(SpMat((g.a[j] + g.ad[j]).pruned()));
    g.b.push_back(SpMat((im * (g.ad[j] - g.a[j])).pruned()));
  }
  g.N = diag_op(L, [](std::uint32_t s) { return static_cast<double>(std::popcount(s)); });
  g.P = diag_op(L, [](std::uint32_t s) { return (std::popcount(s) % 2 == 0) ? 1.0 : -1.0; });

  if (L <= 6) {
    for (int j = 0; j < L; ++j)
      for (int k = j; k < L; ++k) check_car_pair(g, j, k);
  } else {
    check_car_pair(g, 0, 0);
    check_car_pair(g, L - 1, L - 1);
    check_car_pair(g, 0, 1);
    check_car_pair(g, 0, L - 1);
    check_car_pair(g, L - 2, L - 1);
  }
  return g;
}

FockOperator assemble(int L, const std::vector<InteractionTerm>& terms) {
  FockGenerators g = fock_generators(L);
  const std::uint32_t dim = 1u << L;
  SpMat h(dim, dim);
  for (const auto& t : terms) {
    switch (t.kind) {
      case InteractionTerm::Kind::hop:
        h = h + SpMat(t.coeff * (g.ad[t.j] * g.a[t.k]) +
                      std::conj(t.coeff) * (g.ad[t.k] * g.a[t.j]));
        break;
      case InteractionTerm::Kind::pair:
        h = h + SpMat(t.coeff * (g.a[t.j] * g.a[t.k]) +
                      std::conj(t.coeff) * (g.ad[t.k] * g.ad[t.j]));
        break;
      case InteractionTerm::Kind::chem:
        h = h + SpMat(t.coeff * (g.ad[t.j] * g.a[t.j]));
        break;
      case InteractionTerm::Kind::density_density: {
        SpMat zj = SpMat(2.0 * (g.ad[t.j] * g.a[t.j])) - sp_identity(dim);
        SpMat zk = SpMat(2.0 * (g.ad[t.k] * g.a[t.k])) - sp_identity(dim);
        h = h + SpMat(t.coeff * (zj * zk));
        break;
      }
      case InteractionTerm::Kind::raw: {
        SpMat m = sp_identity(dim);
        for (const auto& [site, dagger] : t.monomial)
          m = SpMat(m * (dagger ? g.ad[site] : g.a[site]));
        h = h + SpMat(t.coeff * m);
        break;
      }
    }
  }
  h.prune(cplx(0.0), 0.0);

  const double scale = std::max(1.0, sp_max_abs(h));
  if (sp_max_abs(SpMat(h - SpMat(h.adjoint()))) > 1e-10 * scale)
    throw NonHermitian("assemble: interaction terms do not sum to a Hermitian operator");
  if (sp_max_abs(SpMat(h * g.P - g.P * h)) > 1e-10 * scale)
    throw OddParity("assemble: interaction does not commute with parity");
  return {L, h};
}

GroundSpaceReport ground_space(const FockOperator& h, double deg_tol_scale) {
  if (h.L <= 10) {
    DenseEig eig = dense_eig(h.op);
    return cluster_report(h.L, eig.evals, eig.evecs, deg_tol_scale);
  }
  return iterative_ground_space(h, deg_tol_scale);
}

double kst_mu_e(double w, double delta, double K) {
  const double disc = (2.0 * K + w) * (2.0 * K + w) - delta * delta;
  if (disc < 0.0)
    throw ParameterOutOfDomain("kst chain: (2K+w)^2 - Delta^2 must not be negative");
  return 2.0 * std::sqrt(disc);
}

std::vector<InteractionTerm> kst_terms(int L, double w, double delta, double K,
                                       bool closed) {
  if (L < 2) throw ConfigError("kst_terms: need at least two sites");
  const double mu_e = kst_mu_e(w, delta, K);
  std::vector<InteractionTerm> out;
  const int nb = closed ? L : L - 1;
  for (int b = 0; b < nb; ++b) {
    const int j = b, k = (b + 1) % L;
    auto bond = kst_bond_terms(j, k, cplx(-w, 0.0), cplx(delta, 0.0), K, mu_e);
    if (closed && b == L - 1)
      for (auto& t : bond) t.wrap = true;
    out.insert(out.end(), bond.begin(), bond.end());
  }
  return out;
}

std::vector<InteractionTerm> interacting_flux_terms(int L, double w, double delta,
                                                    double K, double alpha) {
  if (L < 3) throw ConfigError("interacting_flux_terms: need at least three sites");
  const double mu_e = kst_mu_e(w, delta, K);
  const cplx phase = std::exp(cplx(0.0, alpha));
  std::vector<InteractionTerm> out;
  for (int b = 0; b < L; ++b) {
    const int j = b, k = (b + 1) % L;
    const bool closing = (b == L - 1);
    auto bond = kst_bond_terms(j, k, closing ? cplx(-w, 0.0) * phase : cplx(-w, 0.0),
                               closing ? cplx(delta, 0.0) * phase : cplx(delta, 0.0),
                               K, mu_e);
    if (closing)
      for (auto& t : bond) t.wrap = true;
    out.insert(out.end(), bond.begin(), bond.end());
  }
  return out;
}

std::vector<GroundSpaceReport> flux_sweep(int L, double w, double delta, double K,
                                          const std::vector<double>& alphas) {
  std::vector<GroundSpaceReport> out(alphas.size());
  std::exception_ptr failure;
  par::parallel_for(static_cast<int>(alphas.size()), [&](int i) {
    try {
      FockOperator h = assemble(L, interacting_flux_terms(L, w, delta, K, alphas[i]));
      out[i] = ground_space(h);
    } catch (...) {
#ifdef CHAINZ2_OPENMP
#pragma omp critical
#endif
      failure = std::current_exception();
    }
  });
  if (failure) std::rethrow_exception(failure);
  return out;
}

KstReport kst_build_and_verify(int L, double w, double delta, double K) {
  if (L < 2 || L > 12) throw ConfigError("kst_build_and_verify: L must lie in [2, 12]");
  KstReport rep;
  rep.mu_e = kst_mu_e(w, delta, K);

  auto terms = kst_terms(L, w, delta, K, false);
  FockOperator h = assemble(L, terms);
  GroundSpaceReport gs = ground_space(h);
  rep.E0 = gs.E0;
  rep.degeneracy = gs.degeneracy;
  rep.parities = gs.parities;
  rep.gap = gs.gap;

  const double theta = std::atan2(2.0 * delta, rep.mu_e);
  const double phi =
      (delta == 0.0) ? 0.5 * kPi : std::atan(std::sqrt(1.0 / std::tan(0.5 * theta)));
  FockGenerators g = fock_generators(L);
  CVec plus = product_state(g, std::cos(phi), std::sin(phi), std::vector<int>(L, +1));
  CVec minus = product_state(g, std::cos(phi), std::sin(phi), std::vector<int>(L, -1));
  rep.residual_plus = (h.op * plus - rep.E0 * plus).norm();
  rep.residual_minus = (h.op * minus - rep.E0 * minus).norm();

  const double mu_e = rep.mu_e;
  double ff = 0.0;
  for (int b = 0; b + 1 < L; ++b) {
    auto bond = kst_bond_terms(b, b + 1, cplx(-w, 0.0), cplx(delta, 0.0), K, mu_e);
    FockOperator hb = assemble(L, bond);
    const double lam = adjacent_bond_min_eig(bond, b, b + 1);
    ff = std::max(ff, (hb.op * plus - lam * plus).norm());
    ff = std::max(ff, (hb.op * minus - lam * minus).norm());
  }
  rep.ff_residual = ff;
  return rep;
}

KstPathReport kst_path_check(int L, double K, int t_points) {
  if (L < 3 || L > 10) throw ConfigError("kst_path_check: L must lie in [3, 10]");
  if (t_points < 2) throw ConfigError("kst_path_check: need at least two grid points");
  const double mu_e = kst_mu_e(1.0, 1.0, K);
  const double theta = std::atan2(2.0, mu_e);
  FockGenerators g = fock_generators(L);

  auto path_hamiltonian = [&](double t, bool pi_flux) {
    std::vector<InteractionTerm> terms;
    for (int b = 0; b < L; ++b) {
      auto bond = path_bond_terms(b, (b + 1) % L, theta, t, pi_flux && b == 0);
      terms.insert(terms.end(), bond.begin(), bond.end());
    }
    return assemble(L, terms);
  };

  KstPathReport rep;

  std::vector<double> grid(t_points);
  for (int i = 0; i < t_points; ++i)
    grid[i] = 2.0 * K * static_cast<double>(i) / static_cast<double>(t_points - 1);

  // operator identity h_j = Q_j Q_j* + (1+t) Q_j* Q_j on every bond
  double ident = 0.0;
  for (double t : grid) {
    for (int b = 0; b < L; ++b) {
      const int j = b, k = (b + 1) % L;
      SpMat q = path_q(g, j, k, theta, false);
      FockOperator hb = assemble(L, path_bond_terms(j, k, theta, t, false));
      SpMat recon = SpMat(q * SpMat(q.adjoint())) + (1.0 + t) * SpMat(SpMat(q.adjoint()) * q);
      ident = std::max(ident, sp_max_abs(SpMat(hb.op - recon)));
    }
    SpMat qpi = path_q(g, 0, 1, theta, true);
    FockOperator hpi = assemble(L, path_bond_terms(0, 1, theta, t, true));
    SpMat recon = SpMat(qpi * SpMat(qpi.adjoint())) + (1.0 + t) * SpMat(SpMat(qpi.adjoint()) * qpi);
    ident = std::max(ident, sp_max_abs(SpMat(hpi.op - recon)));
  }
  rep.identity_residual = ident;

  // kernel vectors: odd combination at zero flux, even combination at pi flux
  const double beta = std::sqrt(std::tan(0.5 * theta));
  const double u = 1.0 / std::sqrt(1.0 + beta * beta), v = beta * u;
  CVec ap = product_state(g, u, v, std::vector<int>(L, +1));
  CVec am = product_state(g, u, v, std::vector<int>(L, -1));
  CVec psi0 = ap - am;
  psi0.normalize();
  std::vector<int> sp(L, +1), sm(L, -1);
  sp[0] = -1;
  sm[0] = +1;
  CVec phi0 = product_state(g, u, v, sp) + product_state(g, u, v, sm);
  phi0.normalize();

  double ann = 0.0;
  for (int b = 0; b < L; ++b) {
    SpMat q = path_q(g, b, (b + 1) % L, theta, false);
    ann = std::max({ann, (q * psi0).norm(), (SpMat(q.adjoint()) * psi0).norm()});
    if (b > 0)
      ann = std::max({ann, (q * phi0).norm(), (SpMat(q.adjoint()) * phi0).norm()});
  }
  SpMat qpi = path_q(g, 0, 1, theta, true);
  ann = std::max({ann, (qpi * phi0).norm(), (SpMat(qpi.adjoint()) * phi0).norm()});
  rep.q_annihilation = ann;

  FockOperator h00 = path_hamiltonian(0.0, false);
  double mono = 0.0;
  for (double t : grid) {
    FockOperator ht = path_hamiltonian(t, false);
    CMat diff(ht.op - h00.op);
    Eigen::SelfAdjointEigenSolver<CMat> es(diff);
    mono = std::min(mono, es.eigenvalues()(0));
  }
  rep.monotone_min_eig = mono;

  const double stages[4][2] = {{0.0, 0.0}, {0.0, 2.0 * K}, {kPi, 0.0}, {kPi, 2.0 * K}};
  for (const auto& st : stages) {
    FockOperator hs = path_hamiltonian(st[1], st[0] != 0.0);
    GroundSpaceReport gr = ground_space(hs);
    rep.stage_parities.push_back(gr.parities[0]);
    rep.stage_E0.push_back(gr.E0);
  }

  for (double t : grid) rep.gap_grid.push_back(ground_space(path_hamiltonian(t, false)).gap);

  if (L % 2 == 0) {
    DenseEig s1 = dense_eig(path_hamiltonian(2.0 * K, false).op);
    DenseEig s2 = dense_eig(assemble(L, kst_terms(L, 1.0, 1.0, K, true)).op);
    Vec d1 = s1.evals.array() - s1.evals(0);
    Vec d2 = s2.evals.array() - s2.evals(0);
    rep.spectra_match_t2k = (d1 - d2).cwiseAbs().maxCoeff() < 1e-8;
  }
  return rep;
}

MartingaleReport martingale_identities(int L, const Vec& w, bool closed) {
  // bond b couples sites (b, b+1); i w b_even b_odd' plus |w| is nonnegative
  const int sites = closed ? L : 2 * L + 1;
  const int nbonds = closed ? L : 2 * L;
  if (closed && (L < 3 || L > 10))
    throw ConfigError("martingale_identities: closed chain needs L in [3, 10]");
  if (!closed && (L < 1 || 2 * L + 1 > 11))
    throw ConfigError("martingale_identities: double-sided chain needs L in [1, 5]");
  if (w.size() != nbonds)
    throw ConfigError("martingale_identities: coupling vector has the wrong length");
  for (int b = 0; b < nbonds; ++b)
    if (w(b) == 0.0) throw ConfigError("martingale_identities: couplings must be nonzero");

  FockGenerators g = fock_generators(sites);
  const std::uint32_t dim = 1u << sites;
  const SpMat id = sp_identity(dim);
  const cplx im(0.0, 1.0);

  auto bond_term = [&](int b) {
    const int s1 = b, s2 = (b + 1) % sites;
    SpMat m = SpMat(im * w(b) * SpMat(g.b[2 * s1 + 1] * g.b[2 * s2])) + std::abs(w(b)) * id;
    return m;
  };

  // h_n per martingale step; the double-sided chain grows symmetrically
  std::vector<SpMat> steps;
  if (closed) {
    for (int b = 0; b < L; ++b) steps.push_back(bond_term(b));
  } else {
    for (int n = 1; n <= L; ++n)
      steps.push_back(SpMat(bond_term(L - n) + bond_term(L + n - 1)));
  }

  const int ns = static_cast<int>(steps.size());
  std::vector<Mat> kern_h(ns + 1);  // kernel projector of H_n, H_0 = 0
  std::vector<Mat> g_proj(ns);
  kern_h[0] = Mat::Identity(dim, dim);
  SpMat total(dim, dim);
  for (int n = 0; n < ns; ++n) {
    total = SpMat(total + steps[n]);
    kern_h[n + 1] = kernel_projector(CMat(total), 1e-8);
    g_proj[n] = kernel_projector(CMat(steps[n]), 1e-8);
  }

  MartingaleReport rep;
  double gamma = w.cwiseAbs().minCoeff() / 2.0;
  for (int n = 0; n < ns; ++n) {
    // E_n = P_ker(H_n) - P_ker(H_n+1); g_proj[n] projects onto Ker(h_n+1)
    Mat e_n = kern_h[n] - kern_h[n + 1];
    const Mat& gn1 = g_proj[n];
    rep.commutator_max = std::max(rep.commutator_max, (e_n * gn1 - gn1 * e_n).norm());
    rep.sandwich_max = std::max(rep.sandwich_max, (e_n * gn1 * e_n).norm());
  }
  rep.lower_bound_min = 0.0;
  for (int n = 0; n < ns; ++n) {
    CMat m = CMat(steps[n]) - gamma * (Mat::Identity(dim, dim) - g_proj[n]);
    Eigen::SelfAdjointEigenSolver<CMat> es(m);
    rep.lower_bound_min = std::min(rep.lower_bound_min, es.eigenvalues()(0));
  }
  rep.gap = ground_space({sites, total}).gap;
  return rep;
}

}  // namespace chainz2

namespace chainz2::par {

namespace {
int g_threads = 0;
}

void set_threads(int n) { g_threads = n < 0 ? 0 : n; }

int threads() {
  if (g_threads > 0) return g_threads;
#ifdef CHAINZ2_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void serial_for(int n, const std::function<void(int)>& body) {
  for (int i = 0; i < n; ++i) body(i);
}

void parallel_for(int n, const std::function<void(int)>& body) {
#ifdef CHAINZ2_OPENMP
  const int nt = threads();
  if (nt > 1) {
#pragma omp parallel for num_threads(nt) schedule(static)
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
#endif
  serial_for(n, body);
}

CVec spmv_serial(const SpMat& m, const CVec& x) {
  CVec y = CVec::Zero(m.rows());
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it) y(it.row()) += it.value() * x(k);
  return y;
}

CVec spmv(const SpMat& m, const CVec& x) {
#ifdef CHAINZ2_OPENMP
  const int nt = threads();
  if (nt > 1) {
    std::vector<CVec> acc(nt, CVec::Zero(m.rows()));
#pragma omp parallel num_threads(nt)
    {
      CVec& y = acc[omp_get_thread_num()];
#pragma omp for schedule(static)
      for (int k = 0; k < m.outerSize(); ++k)
        for (SpMat::InnerIterator it(m, k); it; ++it) y(it.row()) += it.value() * x(k);
    }
    CVec y = acc[0];
    for (int i = 1; i < nt; ++i) y += acc[i];
    return y;
  }
#endif
  return spmv_serial(m, x);
}

}  // namespace chainz2::par
