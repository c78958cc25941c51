#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "chainz2/bdg.hpp"

using namespace chainz2;

namespace {

// H = [[h, d], [-conj(d), -conj(h)]] with h hermitian and d antisymmetric
CMat bdg_blocks(const CMat& h, const CMat& d) {
  const int L = static_cast<int>(h.rows());
  CMat m(2 * L, 2 * L);
  m.topLeftCorner(L, L) = h;
  m.topRightCorner(L, L) = d;
  m.bottomLeftCorner(L, L) = -d.conjugate();
  m.bottomRightCorner(L, L) = -h.conjugate();
  return m;
}

CMat random_hermitian(int L, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMat m(L, L);
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j) m(i, j) = cplx(g(rng), g(rng));
  return 0.5 * (m + m.adjoint().eval());
}

CMat random_antisym(int L, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMat m(L, L);
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j) m(i, j) = cplx(g(rng), g(rng));
  return 0.5 * (m - m.transpose().eval());
}

BdGMatrix random_bdg(int L, std::mt19937_64& rng) {
  return BdGMatrix(bdg_blocks(random_hermitian(L, rng), random_antisym(L, rng)));
}

// atomic limit: independent sites with on-site energies mu
BdGMatrix atomic_bdg(const Vec& mu) {
  const int L = static_cast<int>(mu.size());
  return BdGMatrix(bdg_blocks(mu.cast<cplx>().asDiagonal(), CMat::Zero(L, L)));
}

}  // namespace

TEST_CASE("bdg constructor validates the symmetries", "[bdg]") {
  CHECK_THROWS_AS(BdGMatrix(CMat::Zero(3, 3)), OddDimension);
  CHECK_THROWS_AS(BdGMatrix(CMat(0, 0)), NonHermitian);

  CMat nh(2, 2);
  nh << cplx(0, 0), cplx(1, 0), cplx(2, 0), cplx(0, 0);
  CHECK_THROWS_AS(BdGMatrix(nh), NonHermitian);

  // hermitian but commuting with K instead of anticommuting
  CMat bad = CMat::Identity(2, 2);
  CHECK_THROWS_AS(BdGMatrix(bad), NotParticleHoleSymmetric);

  std::mt19937_64 rng(421u);
  CHECK_NOTHROW(random_bdg(4, rng));
}

TEST_CASE("majorana form halves the bdg spectrum", "[bdg]") {
  std::mt19937_64 rng(422u);
  for (int L : {2, 3, 5}) {
    const BdGMatrix h = random_bdg(L, rng);
    const SkewMatrix a = majorana_form(h);
    REQUIRE(a.n() == 2 * L);

    Eigen::SelfAdjointEigenSolver<CMat> es(h.matrix());
    Vec pos(L);
    int idx = 0;
    for (int i = 0; i < 2 * L; ++i)
      if (es.eigenvalues()(i) >= 0.0) pos(idx++) = es.eigenvalues()(i);
    REQUIRE(idx == L);
    std::sort(pos.data(), pos.data() + L);

    const Vec e = canonical_form(a).energies;
    for (int i = 0; i < L; ++i)
      CHECK(2.0 * e(i) == Catch::Approx(pos(i)).margin(1e-9));
  }
}

TEST_CASE("bogoliubov transform is canonical", "[bdg]") {
  std::mt19937_64 rng(423u);
  for (int L : {2, 4}) {
    const BdGMatrix h = random_bdg(L, rng);
    const auto [t, e] = bogoliubov_diagonalize(h);
    const CMat& w = t.w;
    const int n = 2 * L;

    CHECK((w * w.adjoint() - CMat::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-9);

    // K conj(W) K = W row by row: the hole row is the conjugate swap of
    // the particle row
    for (int r = 0; r < L; ++r) {
      const CVec top = w.row(r);
      const CVec bot = w.row(L + r);
      CHECK((bot.head(L) - top.tail(L).conjugate()).cwiseAbs().maxCoeff() < 1e-9);
      CHECK((bot.tail(L) - top.head(L).conjugate()).cwiseAbs().maxCoeff() < 1e-9);
    }

    CMat target = CMat::Zero(n, n);
    for (int i = 0; i < L; ++i) {
      CHECK(e(i) >= 0.0);
      target(i, i) = e(i);
      target(L + i, L + i) = -e(i);
    }
    CHECK((w * h.matrix() * w.adjoint() - target).cwiseAbs().maxCoeff() < 1e-8);

    const int ds = canonical_det_sign(t);
    CHECK((ds == 1 || ds == -1));
  }
  CHECK(canonical_det_sign(CanonicalTransform{CMat::Identity(8, 8)}) == 1);
}

TEST_CASE("kitaev index counts on-site inversions", "[bdg]") {
  // each negative on-site energy flips one majorana pair, so the sign is
  // the parity of the inversion count, independent of L
  for (int L : {1, 2, 3, 4, 5}) {
    Vec mu = Vec::Ones(L);
    CHECK(kitaev_index(atomic_bdg(mu)).sign == 1);
    mu(0) = -1.0;
    CHECK(kitaev_index(atomic_bdg(mu)).sign == -1);
    if (L >= 3) {
      mu(2) = -1.0;
      CHECK(kitaev_index(atomic_bdg(mu)).sign == 1);
    }
  }

  Vec mu(4);
  mu << -1.0, 1.0, -1.0, 1.0;
  const Z2Report rep = kitaev_index(atomic_bdg(mu));
  CHECK(rep.sign == 1);
  CHECK(rep.gap == Catch::Approx(1.0));
  CHECK(rep.pfaffian_value != 0.0);

  mu << 0.0, 1.0, 1.0, 1.0;
  CHECK_THROWS_AS(kitaev_index(atomic_bdg(mu)), GaplessHamiltonian);
}

TEST_CASE("flatten yields an orthogonal complex structure", "[bdg]") {
  std::mt19937_64 rng(424u);
  for (int L : {2, 4}) {
    const BdGMatrix h = random_bdg(L, rng);
    const Mat j = flatten(h).j;
    const int n = 2 * L;
    CHECK((j + j.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((j * j + Mat::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-9);
  }

  Vec mu(3);
  mu << 0.0, 1.0, -1.0;
  const BdGMatrix sing = atomic_bdg(mu);
  CHECK_THROWS_AS(flatten(sing), GaplessHamiltonian);
  const Mat j = flatten(sing, 1e-8, true).j;
  CHECK((j * j + Mat::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((j + j.transpose()).cwiseAbs().maxCoeff() < 1e-10);

  // equal kernels receive equal completions
  const Mat j2 = flatten(sing, 1e-8, true).j;
  CHECK((j - j2).cwiseAbs().maxCoeff() == 0.0);
}
