#include "chainz2/bdg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <vector>

namespace chainz2 {

namespace {

CMat phase_transform(int L, double theta) {
  // columns carry (b_odd; b_even) into (a; a*); conjugating H by it and
  // scaling by -i/2 lands on the real Majorana form
  const cplx ep = std::exp(cplx(0.0, -theta / 2.0));
  const cplx em = std::exp(cplx(0.0, theta / 2.0));
  CMat c = CMat::Zero(2 * L, 2 * L);
  const double r = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < L; ++j) {
    c(j, j) = r * ep;
    c(j, L + j) = cplx(0.0, 1.0) * r * ep;
    c(L + j, j) = r * em;
    c(L + j, L + j) = cplx(0.0, -1.0) * r * em;
  }
  return c;
}

CMat conjugate_by_k(const CMat& m) {
  const int L = static_cast<int>(m.rows()) / 2;
  CMat rows(2 * L, 2 * L);
  rows.topRows(L) = m.bottomRows(L);
  rows.bottomRows(L) = m.topRows(L);
  CMat out(2 * L, 2 * L);
  out.leftCols(L) = rows.rightCols(L);
  out.rightCols(L) = rows.leftCols(L);
  return out;
}

CVec phs_partner(const CVec& v) {
  const int L = static_cast<int>(v.size()) / 2;
  CVec out(2 * L);
  out.head(L) = v.tail(L).conjugate();
  out.tail(L) = v.head(L).conjugate();
  return out;
}

}  // namespace

BdGMatrix::BdGMatrix(CMat h) {
  if (h.rows() != h.cols() || h.rows() == 0) throw NonHermitian("BdG matrix must be square and non-empty");
  if (h.rows() % 2 != 0) throw OddDimension("BdG matrix dimension must be 2L");
  const double scale = std::max(h.cwiseAbs().maxCoeff(), 1e-300);
  if ((h - h.adjoint().eval()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1.0))
    throw NonHermitian("BdG matrix must be Hermitian");
  h = 0.5 * (h + h.adjoint().eval());
  if ((conjugate_by_k(h.conjugate()) + h).cwiseAbs().maxCoeff() >
      1e-12 * std::max(scale, 1.0))
    throw NotParticleHoleSymmetric("K conj(H) K must equal -H");
  h_ = 0.5 * (h - conjugate_by_k(h.conjugate()));
}

SkewMatrix majorana_form(const BdGMatrix& h, double theta) {
  const int L = h.sites();
  const CMat c = phase_transform(L, theta);
  const CMat am = cplx(0.0, -0.5) * (c.adjoint() * h.matrix() * c);
  const double scale = rel_scale(h.matrix());
  if (am.imag().cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw NotParticleHoleSymmetric(
        "majorana transform left an imaginary residue");
  return SkewMatrix(am.real());
}

std::pair<CanonicalTransform, Vec> bogoliubov_diagonalize(const BdGMatrix& h) {
  const int L = h.sites();
  const int n = 2 * L;
  Eigen::SelfAdjointEigenSolver<CMat> es(h.matrix());
  const Vec ev = es.eigenvalues();
  const CMat u = es.eigenvectors();
  const double scale = ev.size() > 0 ? ev.cwiseAbs().maxCoeff() : 0.0;
  const double ztol = 1e-12 * std::max(scale, 1.0);

  // inside an exactly degenerate cluster the basis is re-derived from the
  // coordinate directions in order, so already-diagonal input gives W = 1
  CMat vecs = u;
  int start = 0;
  while (start < n) {
    int stop = start + 1;
    while (stop < n && std::abs(ev(stop) - ev(start)) <= ztol) ++stop;
    const int m = stop - start;
    if (m > 1) {
      const CMat block = u.middleCols(start, m);
      const CMat proj = block * block.adjoint();
      int filled = 0;
      for (int k = 0; k < n && filled < m; ++k) {
        CVec cand = proj.col(k);
        for (int f = 0; f < filled; ++f)
          cand -= vecs.col(start + f).dot(cand) * vecs.col(start + f);
        const double nn = cand.norm();
        if (nn > 1e-8) {
          vecs.col(start + filled) = cand / nn;
          ++filled;
        }
      }
      if (filled < m) vecs.middleCols(start, m) = block;
    }
    start = stop;
  }

  std::vector<int> pos, zero;
  for (int i = 0; i < n; ++i) {
    if (std::abs(ev(i)) <= ztol)
      zero.push_back(i);
    else if (ev(i) > 0.0)
      pos.push_back(i);
  }

  CMat w = CMat::Zero(n, n);
  Vec energies = Vec::Zero(L);
  int row = 0;

  if (!zero.empty()) {
    // the kernel is paired through its real Majorana image so that the
    // particle-hole partner of each chosen mode lies in the hole block
    const CMat c = phase_transform(L, 0.0);
    const int mk = static_cast<int>(zero.size());
    Mat raw(n, 2 * mk);
    for (int i = 0; i < mk; ++i) {
      const CVec q = c.adjoint() * vecs.col(zero[i]);
      raw.col(2 * i) = q.real();
      raw.col(2 * i + 1) = q.imag();
    }
    Mat basis = Mat::Zero(n, mk);
    int kept = 0;
    for (int k = 0; k < 2 * mk && kept < mk; ++k) {
      Vec cand = raw.col(k);
      for (int f = 0; f < kept; ++f)
        cand -= basis.col(f).dot(cand) * basis.col(f);
      const double nn = cand.norm();
      if (nn > 1e-8) {
        basis.col(kept) = cand / nn;
        ++kept;
      }
    }
    for (int i = 0; i + 1 < kept; i += 2) {
      const CVec mode =
          (c * (basis.col(i).cast<cplx>() -
                cplx(0.0, 1.0) * basis.col(i + 1).cast<cplx>())) /
          std::sqrt(2.0);
      w.row(row) = mode.adjoint();
      w.row(L + row) = phs_partner(mode).adjoint();
      energies(row) = 0.0;
      ++row;
    }
  }

  for (int idx : pos) {
    if (row >= L) break;
    const CVec mode = vecs.col(idx);
    w.row(row) = mode.adjoint();
    w.row(L + row) = phs_partner(mode).adjoint();
    energies(row) = ev(idx);
    ++row;
  }

  return {CanonicalTransform{w}, energies};
}

int canonical_det_sign(const CanonicalTransform& t) {
  const int n = static_cast<int>(t.w.rows());
  const int L = n / 2;
  const CMat c = phase_transform(L, 0.0);
  const CMat o = c.adjoint() * t.w * c;
  if (o.imag().cwiseAbs().maxCoeff() > 1e-8)
    throw NotParticleHoleSymmetric(
        "transform is not canonical: real form has imaginary residue");
  const double d = o.real().partialPivLu().determinant();
  return d >= 0.0 ? 1 : -1;
}

Z2Report kitaev_index(const BdGMatrix& h, double tol) {
  Z2Report rep;
  rep.tol = tol;
  Eigen::JacobiSVD<CMat> svd(h.matrix());
  const Vec s = svd.singularValues();
  const double top = s(0) > 0.0 ? s(0) : 1.0;
  const double gap = s(s.size() - 1);
  rep.gap = gap;
  if (gap <= tol * top)
    throw GaplessHamiltonian("zero mode within tolerance, index undefined");

  // the pfaffian is taken in the site-interleaved majorana ordering, the
  // normalization in which the atomic chain with positive on-site energies
  // is the positive reference for every L; the block form differs from it
  // by the shuffle parity, which alternates with L
  const SkewMatrix a = majorana_form(h, 0.0);
  const int L = h.sites();
  const int n = 2 * L;
  Mat p = Mat::Zero(n, n);
  for (int j = 0; j < L; ++j) {
    p(2 * j, j) = 1.0;
    p(2 * j + 1, L + j) = 1.0;
  }
  const double pf = pfaffian(SkewMatrix(p * a.entries() * p.transpose()));
  rep.pfaffian_value = pf;
  rep.sign = pf >= 0.0 ? 1 : -1;
  return rep;
}

ComplexStructure flatten(const SkewMatrix& a, double tol, bool complete_kernel) {
  const int n = a.n();
  const CMat m = cplx(0.0, 1.0) * a.entries().cast<cplx>();
  Eigen::SelfAdjointEigenSolver<CMat> es(m);
  const Vec ev = es.eigenvalues();
  const CMat u = es.eigenvectors();
  const double nrm = ev.size() > 0 ? ev.cwiseAbs().maxCoeff() : 0.0;
  const double cut = tol * (nrm > 0.0 ? nrm : 1.0);
  CMat mi = CMat::Zero(n, n);
  std::vector<int> ker;
  for (int k = 0; k < n; ++k) {
    if (std::abs(ev(k)) < cut)
      ker.push_back(k);
    else
      mi += (ev(k) > 0.0 ? 1.0 : -1.0) * (u.col(k) * u.col(k).adjoint());
  }
  Mat j = (cplx(0.0, 1.0) * mi).real();
  if (!ker.empty()) {
    if (!complete_kernel)
      throw GaplessHamiltonian("kernel present and completion disallowed");
    // the completion basis is derived from the kernel projector alone, in
    // coordinate order, so equal kernels always receive equal completions
    const int mk = static_cast<int>(ker.size());
    CMat pk = CMat::Zero(n, n);
    for (int i = 0; i < mk; ++i)
      pk += u.col(ker[i]) * u.col(ker[i]).adjoint();
    const Mat pr = pk.real();
    Mat basis = Mat::Zero(n, mk);
    int kept = 0;
    for (int k = 0; k < n && kept < mk; ++k) {
      Vec cand = pr.col(k);
      for (int f = 0; f < kept; ++f)
        cand -= basis.col(f).dot(cand) * basis.col(f);
      const double nn = cand.norm();
      if (nn > 1e-8) {
        basis.col(kept) = cand / nn;
        ++kept;
      }
    }
    for (int i = 0; i + 1 < kept; i += 2) {
      const Vec qa = basis.col(i);
      const Vec qb = basis.col(i + 1);
      j += qb * qa.transpose() - qa * qb.transpose();
    }
  }
  j = 0.5 * (j - j.transpose().eval());
  return ComplexStructure{j};
}

ComplexStructure flatten(const BdGMatrix& h, double tol, bool complete_kernel) {
  return flatten(majorana_form(h, 0.0), tol, complete_kernel);
}

}  // namespace chainz2
