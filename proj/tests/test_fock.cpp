#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "chainz2/bdg.hpp"
#include "chainz2/fock.hpp"
#include "chainz2/models.hpp"

using namespace chainz2;

namespace {

constexpr double kPi = 3.14159265358979323846;

CMat dense(const SpMat& m) { return CMat(m); }

std::vector<int> sorted_parities(const GroundSpaceReport& g) {
  std::vector<int> p = g.parities;
  std::sort(p.begin(), p.end());
  return p;
}

}  // namespace

TEST_CASE("fock generators satisfy the anticommutation algebra", "[fock]") {
  const FockGenerators f = fock_generators(3);
  const int dim = 8;
  for (int i = 0; i < 6; ++i) {
    const CMat bi = dense(f.b[i]);
    CHECK((bi - bi.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
    for (int j = i; j < 6; ++j) {
      const CMat bj = dense(f.b[j]);
      const CMat anti = bi * bj + bj * bi;
      const CMat want = (i == j) ? CMat(2.0 * CMat::Identity(dim, dim))
                                 : CMat(CMat::Zero(dim, dim));
      CHECK((anti - want).cwiseAbs().maxCoeff() < 1e-13);
    }
    const CMat p = dense(f.P);
    CHECK((p * bi * p + bi).cwiseAbs().maxCoeff() < 1e-13);
  }
  const CMat p = dense(f.P);
  CHECK((p * p - CMat::Identity(dim, dim)).cwiseAbs().maxCoeff() < 1e-14);

  // a_j = (b_2j + i b_2j+1) / 2 in array indexing
  for (int j = 0; j < 3; ++j) {
    const CMat lhs = dense(f.a[j]);
    const CMat rhs =
        0.5 * (dense(f.b[2 * j]) + cplx(0.0, 1.0) * dense(f.b[2 * j + 1]));
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-14);
  }

  CHECK_THROWS_AS(fock_generators(0), ConfigError);
  CHECK_THROWS_AS(fock_generators(15), ConfigError);
}

TEST_CASE("assemble rejects non-hermitian and parity-odd input", "[fock]") {
  using IT = InteractionTerm;
  CHECK_THROWS_AS(assemble(2, {IT::raw(cplx(1.0, 0.0), {{0, true}})}),
                  NonHermitian);
  CHECK_THROWS_AS(assemble(2, {IT::raw(cplx(1.0, 0.0), {{0, true}}),
                               IT::raw(cplx(1.0, 0.0), {{0, false}})}),
                  OddParity);
  CHECK_NOTHROW(assemble(2, {IT::hop(0, 1, cplx(0.5, 0.2)),
                             IT::pair(0, 1, cplx(0.1, -0.3)), IT::chem(1, 0.7),
                             IT::density_density(0, 1, 0.4)}));
}

TEST_CASE("open sweet spot chain has paired bond fermions", "[fock]") {
  const int L = 4;
  const auto spec = ChainSpec::uniform(L, ChainSpec::Boundary::open, 1.0, 0.0);
  const FockOperator h = assemble(L, build_terms(spec));
  const GroundSpaceReport gs = ground_space(h);

  CHECK(gs.degeneracy == 2);
  CHECK(sorted_parities(gs) == std::vector<int>{-1, 1});
  CHECK(gs.gap == Catch::Approx(2.0).margin(1e-9));
  CHECK(gs.E0 == Catch::Approx(-3.0).margin(1e-9));

  const FockGenerators f = fock_generators(L);
  // bond fermions d = (b_odd + i b_even)/2 across each bond annihilate
  // every ground vector
  for (int b = 0; b < L - 1; ++b) {
    const CMat d = 0.5 * (dense(f.b[2 * b + 1]) +
                          cplx(0.0, 1.0) * dense(f.b[2 * b + 2]));
    for (int g = 0; g < gs.degeneracy; ++g)
      CHECK((d * gs.states.col(g)).norm() < 1e-10);
  }

  // the unpaired edge majoranas commute with the chain
  const CMat hm = dense(h.op);
  const CMat edge =
      cplx(0.0, 1.0) * dense(f.b[2 * L - 1]) * dense(f.b[0]);
  CHECK((hm * edge - edge * hm).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("closed chain ground parity follows the coupling signs", "[fock]") {
  for (int L : {4, 5, 6}) {
    const auto per = ChainSpec::uniform(L, ChainSpec::Boundary::periodic, 1.0, 0.0);
    const GroundSpaceReport gs = ground_space(assemble(L, build_terms(per)));
    CHECK(gs.degeneracy == 1);
    CHECK(gs.parities == std::vector<int>{-1});
    CHECK(gs.gap == Catch::Approx(2.0).margin(1e-9));
  }
  {
    const auto anti =
        ChainSpec::uniform(6, ChainSpec::Boundary::antiperiodic, 1.0, 0.0);
    const GroundSpaceReport gs = ground_space(assemble(6, build_terms(anti)));
    CHECK(gs.degeneracy == 1);
    CHECK(gs.parities == std::vector<int>{1});
  }

  // flipping bond signs moves the parity with the product of the signs
  ChainSpec mixed = ChainSpec::uniform(4, ChainSpec::Boundary::periodic, 1.0, 0.0);
  mixed.w << 1.0, -1.0, 1.0, -1.0;
  GroundSpaceReport gs = ground_space(assemble(4, build_terms(mixed)));
  CHECK(gs.degeneracy == 1);
  CHECK(gs.parities == std::vector<int>{-1});
  CHECK(gs.gap == Catch::Approx(2.0).margin(1e-9));

  mixed.w << 1.0, 1.0, 1.0, -0.5;
  gs = ground_space(assemble(4, build_terms(mixed)));
  CHECK(gs.degeneracy == 1);
  CHECK(gs.parities == std::vector<int>{1});
  CHECK(gs.gap == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("quadratic chains match the additive mode spectrum", "[fock]") {
  ChainSpec spec = ChainSpec::uniform(5, ChainSpec::Boundary::open, 0.8, 0.6, 0.3);
  const FockOperator h = assemble(spec.L, build_terms(spec));
  Eigen::SelfAdjointEigenSolver<CMat> es(CMat(h.op));
  const Vec ed = es.eigenvalues();

  const auto [t, e] = bogoliubov_diagonalize(build_bdg(spec));
  (void)t;
  const int dim = 1 << spec.L;
  Vec add(dim);
  for (int s = 0; s < dim; ++s) {
    double sum = 0.0;
    for (int k = 0; k < spec.L; ++k)
      if (s & (1 << k)) sum += e(k);
    add(s) = sum;
  }
  // the builders differ by a filling-independent constant, fixed by
  // matching total traces
  const double shift = (CMat(h.op).trace().real() - add.sum()) / dim;
  std::sort(add.data(), add.data() + dim);
  for (int s = 0; s < dim; ++s)
    CHECK(add(s) + shift == Catch::Approx(ed(s)).margin(1e-9));
}

TEST_CASE("interacting chain closed forms at the solvable point", "[fock]") {
  CHECK(kst_mu_e(1.0, 0.5, 1.0) ==
        Catch::Approx(2.0 * std::sqrt(9.0 - 0.25)).margin(1e-12));
  CHECK_THROWS_AS(kst_mu_e(0.5, 1.0, 0.0), ParameterOutOfDomain);

  struct Point {
    double w, d, K;
    double gaps[4];  // L = 3..6
  };
  const Point pts[] = {
      {1.0, 0.5, 1.0, {1.041960, 0.634105, 0.429938, 0.314211}},
      {1.0, 0.0, 0.5, {1.0, 0.585786, 0.381966, 0.267949}},
      {2.0, 1.0, 1.0, {2.127017, 1.329287, 0.929235, 0.701987}},
  };
  for (const Point& p : pts) {
    for (int L = 3; L <= 6; ++L) {
      const KstReport rep = kst_build_and_verify(L, p.w, p.d, p.K);
      CHECK(rep.mu_e == Catch::Approx(kst_mu_e(p.w, p.d, p.K)).margin(1e-12));
      CHECK(rep.degeneracy == 2);
      REQUIRE(rep.parities.size() == 2);
      CHECK(rep.parities[0] * rep.parities[1] == -1);
      CHECK(rep.residual_plus < 1e-9);
      CHECK(rep.residual_minus < 1e-9);
      CHECK(rep.ff_residual < 1e-9);
      CHECK(rep.gap == Catch::Approx(p.gaps[L - 3]).margin(1e-5));
    }
  }
  CHECK_THROWS_AS(kst_build_and_verify(1, 1.0, 0.5, 1.0), ConfigError);
}

TEST_CASE("deformation path stays gapped and frustration free", "[fock]") {
  const KstPathReport rep = kst_path_check(6, 1.0);
  CHECK(rep.identity_residual < 1e-9);
  CHECK(rep.q_annihilation < 1e-9);
  CHECK(rep.monotone_min_eig > -1e-10);
  CHECK(rep.stage_parities == std::vector<int>{-1, -1, 1, 1});
  for (double e : rep.stage_E0) CHECK(std::abs(e) < 1e-9);
  REQUIRE(rep.gap_grid.size() >= 2);
  CHECK(rep.gap_grid.front() == Catch::Approx(0.114382).margin(1e-5));
  CHECK(rep.gap_grid.back() == Catch::Approx(0.159095).margin(1e-5));
  CHECK(rep.spectra_match_t2k);

  const KstPathReport odd = kst_path_check(5, 1.0);
  CHECK(odd.gap_grid.front() == Catch::Approx(0.114382).margin(1e-5));
  CHECK(odd.gap_grid.back() == Catch::Approx(0.164379).margin(1e-5));
  CHECK_FALSE(odd.spectra_match_t2k);

  CHECK_THROWS_AS(kst_path_check(2, 1.0), ConfigError);
}

TEST_CASE("flux endpoints exchange the ground parity", "[fock]") {
  // sampled just off the crossing so the dip shows as a small but clean gap
  const auto quad = flux_sweep(6, 1.0, 1.0, 0.0, {0.0, kPi / 2.0 - 0.03, kPi});
  REQUIRE(quad.size() == 3);
  CHECK(quad[0].gap == Catch::Approx(2.0).margin(1e-9));
  CHECK(quad[0].parities == std::vector<int>{-1});
  CHECK(quad[2].parities == std::vector<int>{1});
  CHECK(quad[1].degeneracy == 1);
  CHECK(quad[1].gap < 0.5 * quad[0].gap);

  const auto inter = flux_sweep(6, 1.0, 1.0, 1.0, {0.0, kPi});
  REQUIRE(inter.size() == 2);
  CHECK(inter[0].degeneracy == 1);
  CHECK(inter[1].degeneracy == 1);
  CHECK(inter[0].parities == std::vector<int>{-1});
  CHECK(inter[1].parities == std::vector<int>{1});
  CHECK(inter[0].E0 == Catch::Approx(-12.0).margin(1e-9));
  CHECK(inter[1].E0 == Catch::Approx(-12.0).margin(1e-9));
  CHECK(inter[0].gap == Catch::Approx(0.159095).margin(1e-5));
  CHECK(inter[1].gap == Catch::Approx(0.459923).margin(1e-5));
}

TEST_CASE("supermartingale identities hold on random sign chains", "[fock]") {
  Vec w5(5);
  w5 << 1.0, -1.0, 1.0, 1.0, -1.0;
  const MartingaleReport closed = martingale_identities(5, w5, true);
  CHECK(closed.commutator_max < 1e-10);
  CHECK(closed.sandwich_max < 1e-10);
  CHECK(closed.lower_bound_min > -1e-10);
  CHECK(closed.gap == Catch::Approx(2.0).margin(1e-9));

  Vec w4(4);
  w4 << 1.0, 1.0, -1.0, 1.0;
  const MartingaleReport ds = martingale_identities(2, w4, false);
  CHECK(ds.commutator_max < 1e-10);
  CHECK(ds.sandwich_max < 1e-10);
  CHECK(ds.lower_bound_min > -1e-10);
  CHECK(ds.gap == Catch::Approx(2.0).margin(1e-9));

  CHECK_THROWS_AS(martingale_identities(2, Vec::Ones(2), true), ConfigError);
  Vec wz(5);
  wz << 1.0, 0.0, 1.0, 1.0, 1.0;
  CHECK_THROWS_AS(martingale_identities(5, wz, true), ConfigError);
}

TEST_CASE("iterative ground solver agrees with the dense path", "[fock]") {
  const auto small = ChainSpec::uniform(10, ChainSpec::Boundary::open, 1.0, 0.0);
  const GroundSpaceReport d = ground_space(assemble(10, build_terms(small)));
  CHECK(d.degeneracy == 2);
  CHECK(d.E0 == Catch::Approx(-9.0).margin(1e-9));
  CHECK(d.gap == Catch::Approx(2.0).margin(1e-9));

  const auto big = ChainSpec::uniform(11, ChainSpec::Boundary::open, 1.0, 0.0);
  const GroundSpaceReport it = ground_space(assemble(11, build_terms(big)));
  CHECK(it.degeneracy == 2);
  CHECK(sorted_parities(it) == std::vector<int>{-1, 1});
  CHECK(it.E0 == Catch::Approx(-10.0).margin(1e-7));
  CHECK(it.gap == Catch::Approx(2.0).margin(1e-6));
}
