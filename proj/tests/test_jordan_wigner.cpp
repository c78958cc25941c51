#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <map>

#include "chainz2/jordan_wigner.hpp"
#include "chainz2/models.hpp"

using namespace chainz2;

namespace {

cplx coeff_of(const SpinHamiltonian& h, const std::map<int, char>& letters) {
  for (const PauliString& s : h.terms)
    if (s.letters == letters) return s.coeff;
  return cplx(0.0, 0.0);
}

double match_distance(const SpinHamiltonian& a, const SpinHamiltonian& b) {
  double worst = 0.0;
  for (const PauliString& s : a.terms)
    worst = std::max(worst, std::abs(s.coeff - coeff_of(b, s.letters)));
  for (const PauliString& s : b.terms)
    worst = std::max(worst, std::abs(s.coeff - coeff_of(a, s.letters)));
  return worst;
}

}  // namespace

TEST_CASE("single site dictionary", "[jw]") {
  const SpinHamiltonian z = jw_forward(2, {InteractionTerm::chem(0, 1.0)});
  CHECK(std::abs(coeff_of(z, {{0, 'Z'}}) - cplx(0.5, 0.0)) < 1e-14);
  CHECK(std::abs(coeff_of(z, {}) - cplx(0.5, 0.0)) < 1e-14);
  CHECK(z.terms.size() == 2);

  // density-density couplings collapse to a bare ZZ string
  const SpinHamiltonian zz =
      jw_forward(3, {InteractionTerm::density_density(0, 2, 0.8)});
  CHECK(zz.terms.size() == 1);
  CHECK(std::abs(coeff_of(zz, {{0, 'Z'}, {2, 'Z'}}) - cplx(0.8, 0.0)) < 1e-14);
}

TEST_CASE("kitaev bond maps onto ising and xy couplings", "[jw]") {
  const double J = 0.7;
  const SpinHamiltonian xx = jw_forward(
      2, {InteractionTerm::hop(0, 1, -J), InteractionTerm::pair(0, 1, J)});
  CHECK(xx.terms.size() == 1);
  CHECK(std::abs(coeff_of(xx, {{0, 'X'}, {1, 'X'}}) - cplx(-J, 0.0)) < 1e-14);

  const SpinHamiltonian pp = jw_forward(2, {InteractionTerm::pair(0, 1, 1.0)});
  CHECK(std::abs(coeff_of(pp, {{0, 'X'}, {1, 'X'}}) - cplx(-0.5, 0.0)) < 1e-14);
  CHECK(std::abs(coeff_of(pp, {{0, 'Y'}, {1, 'Y'}}) - cplx(0.5, 0.0)) < 1e-14);

  // hop alone splits evenly between the two couplings
  const SpinHamiltonian hh = jw_forward(2, {InteractionTerm::hop(0, 1, -1.0)});
  CHECK(std::abs(coeff_of(hh, {{0, 'X'}, {1, 'X'}}) - cplx(-0.5, 0.0)) < 1e-14);
  CHECK(std::abs(coeff_of(hh, {{0, 'Y'}, {1, 'Y'}}) - cplx(-0.5, 0.0)) < 1e-14);
}

TEST_CASE("transverse field chain string form", "[jw]") {
  const int L = 4;
  const double J = 0.8, h = 0.3;
  std::vector<InteractionTerm> terms;
  for (int j = 0; j < L; ++j) terms.push_back(InteractionTerm::chem(j, -2.0 * h));
  for (int j = 0; j + 1 < L; ++j) {
    terms.push_back(InteractionTerm::hop(j, j + 1, -J));
    terms.push_back(InteractionTerm::pair(j, j + 1, J));
  }
  const SpinHamiltonian s = jw_forward(L, terms);
  for (int j = 0; j + 1 < L; ++j)
    CHECK(std::abs(coeff_of(s, {{j, 'X'}, {j + 1, 'X'}}) - cplx(-J, 0.0)) < 1e-13);
  for (int j = 0; j < L; ++j)
    CHECK(std::abs(coeff_of(s, {{j, 'Z'}}) - cplx(-h, 0.0)) < 1e-13);
  CHECK(std::abs(coeff_of(s, {}) - cplx(-h * L, 0.0)) < 1e-13);

  const CMat sm = spin_matrix(s);
  const CMat fm = CMat(assemble(L, terms).op);
  CHECK((sm - fm).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("string images match the fock matrices", "[jw]") {
  // the longer jw strings carry the parity tail, checked against the
  // operator assembled directly in the occupation basis
  const int L = 4;
  const std::vector<InteractionTerm> terms = {
      InteractionTerm::hop(0, 2, cplx(0.4, 0.1)),
      InteractionTerm::pair(1, 3, cplx(-0.2, 0.6)),
      InteractionTerm::chem(2, 0.9),
      InteractionTerm::density_density(0, 3, 0.5),
  };
  const SpinHamiltonian s = jw_forward(L, terms);
  CHECK((spin_matrix(s) - CMat(assemble(L, terms).op)).cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("parity maps to the full z string", "[jw]") {
  for (int L : {2, 3}) {
    SpinHamiltonian zs;
    zs.L = L;
    PauliString all;
    all.coeff = (L % 2 == 0) ? 1.0 : -1.0;
    for (int j = 0; j < L; ++j) all.letters[j] = 'Z';
    zs.terms.push_back(all);
    const CMat p = CMat(fock_generators(L).P);
    CHECK((spin_matrix(zs) - p).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("inverse reconstructs local fermionic terms", "[jw]") {
  const auto spec = ChainSpec::uniform(5, ChainSpec::Boundary::open, 1.0, 0.7, 0.4);
  const std::vector<InteractionTerm> terms = build_terms(spec);
  const SpinHamiltonian h = jw_forward(5, terms);
  const std::vector<InteractionTerm> back = jw_inverse(h);
  const SpinHamiltonian again = jw_forward(5, back);
  CHECK(match_distance(normalized(h), normalized(again)) < 1e-12);
  CHECK((spin_matrix(h) - CMat(assemble(5, terms).op)).cwiseAbs().maxCoeff() <
        1e-12);
  CHECK((spin_matrix(h) - CMat(assemble(5, back).op)).cwiseAbs().maxCoeff() <
        1e-12);

  // single z strings invert to number operators
  SpinHamiltonian z;
  z.L = 1;
  z.terms.push_back(PauliString{cplx(1.0, 0.0), {{0, 'Z'}}});
  const auto nz = jw_inverse(z);
  const CMat m = CMat(assemble(1, nz).op);
  CMat want(2, 2);
  want << cplx(-1.0, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0), cplx(1.0, 0.0);
  CHECK((m - want).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("non even and non chain strings are rejected", "[jw]") {
  SpinHamiltonian odd;
  odd.L = 3;
  odd.terms.push_back(PauliString{cplx(1.0, 0.0), {{0, 'X'}}});
  CHECK_THROWS_AS(jw_inverse(odd), NonLocalizable);

  // a hole in the string tail is the image of a density factor, so the
  // inverse closes the gap with a 2n - 1 and the round trip is exact
  SpinHamiltonian gap;
  gap.L = 3;
  gap.terms.push_back(PauliString{cplx(1.0, 0.0), {{0, 'X'}, {2, 'X'}}});
  const SpinHamiltonian gap_back = normalized(jw_forward(3, jw_inverse(gap)));
  REQUIRE(gap_back.terms.size() == 1);
  CHECK(gap_back.terms[0].letters == gap.terms[0].letters);
  CHECK(std::abs(gap_back.terms[0].coeff - gap.terms[0].coeff) < 1e-12);

  SpinHamiltonian ok;
  ok.L = 3;
  ok.terms.push_back(
      PauliString{cplx(1.0, 0.0), {{0, 'X'}, {1, 'Z'}, {2, 'X'}}});
  CHECK_NOTHROW(jw_inverse(ok));

  const auto per = ChainSpec::uniform(4, ChainSpec::Boundary::periodic, 1.0, 0.0);
  CHECK_THROWS_AS(jw_forward(4, build_terms(per)), WraparoundTerm);
  CHECK_THROWS_AS(jw_forward(0, {}), ConfigError);
}

TEST_CASE("spin matrix bounds and line format", "[jw]") {
  SpinHamiltonian h;
  h.L = 6;
  h.terms.push_back(PauliString{cplx(0.5, 0.0), {{3, 'X'}, {4, 'X'}}});
  CHECK(to_lines(h) == "0.5  X3 X4\n");
  CHECK_NOTHROW(spin_matrix(h));

  h.terms.push_back(PauliString{cplx(0.0, -1.25), {{0, 'Y'}, {5, 'Z'}}});
  CHECK(to_lines(h) == "0.5  X3 X4\n-1.25i  Y0 Z5\n");

  SpinHamiltonian big;
  big.L = 13;
  CHECK_THROWS_AS(spin_matrix(big), ConfigError);
  SpinHamiltonian out;
  out.L = 2;
  out.terms.push_back(PauliString{cplx(1.0, 0.0), {{5, 'X'}, {6, 'X'}}});
  CHECK_THROWS_AS(spin_matrix(out), ConfigError);
}
