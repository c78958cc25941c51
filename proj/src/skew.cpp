#include "chainz2/skew.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace chainz2 {

double rel_scale(const Mat& a) {
  if (a.size() == 0) return 1.0;
  double s = a.jacobiSvd().singularValues()(0);
  return s > 0.0 ? s : 1.0;
}

double rel_scale(const CMat& a) {
  if (a.size() == 0) return 1.0;
  double s = a.jacobiSvd().singularValues()(0);
  return s > 0.0 ? s : 1.0;
}

SkewMatrix::SkewMatrix(Mat entries) {
  if (entries.rows() != entries.cols() || entries.rows() == 0)
    throw NotSkewSymmetric("skew matrix must be square and non-empty");
  if (entries.rows() % 2 != 0)
    throw OddDimension("skew matrix dimension must be even");
  const double scale = std::max(entries.cwiseAbs().maxCoeff(), 1e-300);
  const double asym = (entries + entries.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(scale, 1.0))
    throw NotSkewSymmetric("matrix is not skew-symmetric within tolerance");
  a_ = 0.5 * (entries - entries.transpose().eval());
}

double pfaffian(const SkewMatrix& a) {
  Mat m = a.entries();
  const int n = a.n();
  if (n % 2 != 0) throw OddDimension("pfaffian needs even dimension");
  double sign = 1.0;
  for (int k = 0; k + 2 < n; ++k) {
    int p = k + 1;
    for (int i = k + 2; i < n; ++i)
      if (std::abs(m(i, k)) > std::abs(m(p, k))) p = i;
    if (m(p, k) == 0.0) {
      if (k % 2 == 0) return 0.0;
      continue;
    }
    if (p != k + 1) {
      m.row(p).swap(m.row(k + 1));
      m.col(p).swap(m.col(k + 1));
      sign = -sign;
    }
    for (int i = k + 2; i < n; ++i) {
      const double f = m(i, k) / m(k + 1, k);
      if (f == 0.0) continue;
      m.row(i) -= f * m.row(k + 1);
      m.col(i) -= f * m.col(k + 1);
      m(i, k) = m(k, i) = 0.0;
    }
  }
  double pf = sign;
  for (int i = 0; i + 1 < n; i += 2) pf *= m(i, i + 1);
  return pf;
}

namespace {

struct Rot {
  double c = 1.0, s = 0.0;
};

Rot make_rot(double angle) { return {std::cos(angle), std::sin(angle)}; }

// columns p and q of m pick up m(:,p) c + m(:,q) s and -m(:,p) s + m(:,q) c
void apply_right(Mat& m, int p, int q, const Rot& g) {
  for (int r = 0; r < m.rows(); ++r) {
    const double x = m(r, p), y = m(r, q);
    m(r, p) = g.c * x + g.s * y;
    m(r, q) = -g.s * x + g.c * y;
  }
}

void apply_left_t(Mat& m, int p, int q, const Rot& g) {
  for (int cidx = 0; cidx < m.cols(); ++cidx) {
    const double x = m(p, cidx), y = m(q, cidx);
    m(p, cidx) = g.c * x + g.s * y;
    m(q, cidx) = -g.s * x + g.c * y;
  }
}

// two-sided Jacobi SVD built from plane rotations only, so the
// accumulated factors keep determinant +1 throughout
void rotation_svd(const Mat& b, Mat& u, Mat& w, Vec& sigma, int& flips) {
  const int L = static_cast<int>(b.rows());
  Mat m = b;
  u = Mat::Identity(L, L);
  w = Mat::Identity(L, L);
  const double fro = std::max(m.norm(), 1e-300);
  for (int sweep = 0; sweep < 120; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < L; ++p)
      for (int q = 0; q < L; ++q)
        if (p != q) off += m(p, q) * m(p, q);
    if (std::sqrt(off) < 1e-15 * fro) break;
    for (int p = 0; p < L - 1; ++p) {
      for (int q = p + 1; q < L; ++q) {
        const double a = m(p, p), bb = m(p, q), c = m(q, p), d = m(q, q);
        if (bb == 0.0 && c == 0.0) continue;
        // left rotation symmetrizes the 2x2 block, second rotation
        // diagonalizes the symmetric remainder
        const Rot g1 = make_rot(std::atan2(c - bb, a + d));
        const double alpha = g1.c * a + g1.s * c;
        const double beta = g1.c * bb + g1.s * d;
        const double delta = -g1.s * bb + g1.c * d;
        const double phi = 0.5 * std::atan2(2.0 * beta, alpha - delta);
        const Rot g2 = make_rot(phi);
        const Rot gl{g1.c * g2.c - g1.s * g2.s, g1.s * g2.c + g1.c * g2.s};
        apply_left_t(m, p, q, gl);
        apply_right(m, p, q, g2);
        apply_right(u, p, q, gl);
        apply_right(w, p, q, g2);
        m(p, q) = m(q, p) = 0.0;
      }
    }
  }
  sigma = m.diagonal();
  flips = 0;
  for (int i = 0; i < L; ++i) {
    if (sigma(i) < 0.0) {
      sigma(i) = -sigma(i);
      w.col(i) = -w.col(i);
      ++flips;
    }
  }
}

}  // namespace

CanonicalSkewForm canonical_form(const SkewMatrix& a, double tol) {
  (void)tol;
  const int n = a.n();
  const int L = n / 2;
  Mat m = a.entries();
  Mat q = Mat::Identity(n, n);
  int reflections = 0;

  // Householder reduction to skew tridiagonal; skewness is preserved
  // exactly by the rank-2 update A += v z^T - z v^T
  for (int k = 0; k + 2 < n; ++k) {
    Vec x = m.col(k).segment(k + 1, n - k - 1);
    const double xn = x.norm();
    if (xn == 0.0) continue;
    Vec v = Vec::Zero(n);
    v.segment(k + 1, n - k - 1) = x;
    v(k + 1) += (x(0) >= 0.0 ? xn : -xn);
    const double vn2 = v.squaredNorm();
    if (vn2 == 0.0) continue;
    const double tau = 2.0 / vn2;
    Vec z = tau * (m * v);
    m += v * z.transpose() - z * v.transpose();
    q -= tau * v * (v.transpose() * q);
    ++reflections;
    for (int i = k + 2; i < n; ++i) m(i, k) = m(k, i) = 0.0;
  }

  // perfect shuffle: odd-position majoranas first, block is lower bidiagonal
  std::vector<int> perm(n);
  for (int r = 0; r < L; ++r) perm[r] = 2 * r;
  for (int r = 0; r < L; ++r) perm[L + r] = 2 * r + 1;
  std::vector<bool> seen(n, false);
  int cycles = 0;
  for (int i = 0; i < n; ++i) {
    if (seen[i]) continue;
    ++cycles;
    for (int j = i; !seen[j]; j = perm[j]) seen[j] = true;
  }
  const int shuffle_sign = ((n - cycles) % 2 == 0) ? 1 : -1;

  Mat b = Mat::Zero(L, L);
  for (int i = 0; i < L; ++i) {
    b(i, i) = m(2 * i, 2 * i + 1);
    if (i > 0) b(i, i - 1) = -m(2 * i - 1, 2 * i);
  }

  Mat u, w;
  Vec sigma;
  int flips = 0;
  rotation_svd(b, u, w, sigma, flips);

  // ascending with ties by original index; the same permutation acts on
  // both factors, so it never moves det
  std::vector<int> ord(L);
  std::iota(ord.begin(), ord.end(), 0);
  std::stable_sort(ord.begin(), ord.end(), [&](int i, int j) {
    if (sigma(i) != sigma(j)) return sigma(i) < sigma(j);
    return i < j;
  });
  Mat us(L, L), ws(L, L);
  Vec es(L);
  for (int p = 0; p < L; ++p) {
    es(p) = sigma(ord[p]);
    us.col(p) = u.col(ord[p]);
    ws.col(p) = w.col(ord[p]);
  }

  Mat v = Mat::Zero(n, n);
  // rows of V: first block U^T then W^T, each composed with the shuffle
  // and the Householder product
  Mat pq(n, n);
  for (int r = 0; r < n; ++r) pq.row(r) = q.row(perm[r]);
  v.topRows(L) = us.transpose() * pq.topRows(L);
  v.bottomRows(L) = ws.transpose() * pq.bottomRows(L);

  CanonicalSkewForm out;
  out.energies = es;
  out.orthogonal = v;
  int sgn = (reflections % 2 == 0) ? 1 : -1;
  sgn *= shuffle_sign;
  if (flips % 2 != 0) sgn = -sgn;
  out.det_sign = sgn;
  return out;
}

int kernel_dim(const SkewMatrix& a, double tol) {
  Eigen::JacobiSVD<Mat> svd(a.entries());
  const Vec s = svd.singularValues();
  const double scale = s.size() > 0 && s(0) > 0.0 ? s(0) : 1.0;
  int cnt = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) < tol * scale) ++cnt;
  return cnt;
}

int kernel_dim(const Mat& symmetric, double tol) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 *
                                        (symmetric + symmetric.transpose()));
  const Vec ev = es.eigenvalues();
  const double scale =
      ev.size() > 0 ? std::max(ev.cwiseAbs().maxCoeff(), 0.0) : 0.0;
  const double s = scale > 0.0 ? scale : 1.0;
  int cnt = 0;
  for (int i = 0; i < ev.size(); ++i)
    if (std::abs(ev(i)) < tol * s) ++cnt;
  return cnt;
}

}  // namespace chainz2
