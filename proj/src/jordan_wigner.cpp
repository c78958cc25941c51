#include "chainz2/jordan_wigner.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <utility>

namespace chainz2 {

namespace {

// single-site products; the letter set {X, Y, Z} is cyclic with phase i
cplx mul_letter(char la, char lb, char& out) {
  if (la == lb) {
    out = 0;
    return {1.0, 0.0};
  }
  auto cyc = [](char a, char b) {
    return (a == 'X' && b == 'Y') || (a == 'Y' && b == 'Z') || (a == 'Z' && b == 'X');
  };
  if (cyc(la, lb)) {
    out = (la == 'X') ? 'Z' : (la == 'Y') ? 'X' : 'Y';
    return {0.0, 1.0};
  }
  out = (la == 'X') ? 'Y' : (la == 'Y') ? 'Z' : 'X';
  return {0.0, -1.0};
}

PauliString mul_strings(const PauliString& a, const PauliString& b) {
  PauliString out;
  out.coeff = a.coeff * b.coeff;
  out.letters = a.letters;
  for (const auto& [site, lb] : b.letters) {
    auto it = out.letters.find(site);
    if (it == out.letters.end()) {
      out.letters.emplace(site, lb);
      continue;
    }
    // letters on distinct sites commute, so no reordering phase arises here
    char merged = 0;
    out.coeff *= mul_letter(it->second, lb, merged);
    if (merged == 0)
      out.letters.erase(it);
    else
      it->second = merged;
  }
  return out;
}

// spin image of the Majorana b[idx]; the tail of Z letters covers all lower sites
PauliString majorana_string(int idx) {
  const int site = idx / 2;
  const bool odd = (idx % 2 != 0);
  PauliString s;
  double sign = (site % 2 == 0) ? 1.0 : -1.0;
  if (odd) sign = -sign;
  s.coeff = cplx(sign, 0.0);
  for (int k = 0; k < site; ++k) s.letters.emplace(k, 'Z');
  s.letters.emplace(site, odd ? 'Y' : 'X');
  return s;
}

PauliString z_string(int site) {
  PauliString s;
  s.coeff = cplx(1.0, 0.0);
  s.letters.emplace(site, 'Z');
  return s;
}

using Poly = std::vector<PauliString>;

// spin image of a_site (dagger false) or a_site^* (dagger true)
Poly ladder_poly(int site, bool dagger) {
  PauliString even = majorana_string(2 * site);
  PauliString odd = majorana_string(2 * site + 1);
  const cplx half(0.5, 0.0);
  const cplx ihalf = dagger ? cplx(0.0, -0.5) : cplx(0.0, 0.5);
  even.coeff *= half;
  odd.coeff *= ihalf;
  return {even, odd};
}

void mul_poly_inplace(Poly& p, const Poly& factor) {
  Poly out;
  out.reserve(p.size() * factor.size());
  for (const auto& a : p)
    for (const auto& b : factor) out.push_back(mul_strings(a, b));
  p = std::move(out);
}

using Monomial = std::vector<std::pair<int, bool>>;

void append_monomials(const InteractionTerm& t, std::vector<std::pair<cplx, Monomial>>& out) {
  const cplx c = t.coeff;
  const int j = t.j;
  const int k = t.k;
  switch (t.kind) {
    case InteractionTerm::Kind::hop:
      out.push_back({c, {{j, true}, {k, false}}});
      out.push_back({std::conj(c), {{k, true}, {j, false}}});
      break;
    case InteractionTerm::Kind::pair:
      out.push_back({c, {{j, false}, {k, false}}});
      out.push_back({std::conj(c), {{k, true}, {j, true}}});
      break;
    case InteractionTerm::Kind::chem:
      out.push_back({c, {{j, true}, {j, false}}});
      break;
    case InteractionTerm::Kind::density_density:
      // (2n_j - 1)(2n_k - 1) expanded into number operators
      out.push_back({4.0 * c, {{j, true}, {j, false}, {k, true}, {k, false}}});
      out.push_back({-2.0 * c, {{j, true}, {j, false}}});
      out.push_back({-2.0 * c, {{k, true}, {k, false}}});
      out.push_back({c, {}});
      break;
    case InteractionTerm::Kind::raw:
      out.push_back({c, t.monomial});
      break;
  }
}

void check_sites(int L, const std::vector<std::pair<cplx, Monomial>>& monos) {
  for (const auto& [c, mono] : monos) {
    (void)c;
    for (const auto& [site, dag] : mono) {
      (void)dag;
      if (site < 0 || site >= L)
        throw ConfigError("site index " + std::to_string(site) + " outside chain of length " +
                          std::to_string(L));
    }
  }
}

std::string format_coeff(const cplx& c) {
  std::ostringstream os;
  os << std::setprecision(12);
  const double re = c.real();
  const double im = c.imag();
  if (std::abs(im) < 1e-13) {
    os << re;
  } else if (std::abs(re) < 1e-13) {
    os << im << "i";
  } else {
    os << re << (im < 0 ? "-" : "+") << std::abs(im) << "i";
  }
  return os.str();
}

}  // namespace

SpinHamiltonian normalized(const SpinHamiltonian& h, double drop_tol) {
  std::map<std::map<int, char>, cplx> acc;
  for (const auto& t : h.terms) acc[t.letters] += t.coeff;
  SpinHamiltonian out;
  out.L = h.L;
  for (const auto& [letters, coeff] : acc) {
    if (std::abs(coeff) <= drop_tol) continue;
    PauliString s;
    s.coeff = coeff;
    s.letters = letters;
    out.terms.push_back(std::move(s));
  }
  return out;
}

SpinHamiltonian jw_forward(int L, const std::vector<InteractionTerm>& terms) {
  if (L < 1) throw ConfigError("chain length must be positive");
  for (const auto& t : terms)
    if (t.wrap)
      throw WraparoundTerm("term couples across the chain closure; the string transform needs an open chain");
  std::vector<std::pair<cplx, Monomial>> monos;
  for (const auto& t : terms) append_monomials(t, monos);
  check_sites(L, monos);

  SpinHamiltonian out;
  out.L = L;
  for (const auto& [c, mono] : monos) {
    Poly poly;
    PauliString unit;
    unit.coeff = c;
    poly.push_back(unit);
    for (const auto& [site, dag] : mono) mul_poly_inplace(poly, ladder_poly(site, dag));
    for (auto& s : poly) out.terms.push_back(std::move(s));
  }
  return normalized(out, 1e-14);
}

std::vector<InteractionTerm> jw_inverse(const SpinHamiltonian& h) {
  std::vector<InteractionTerm> out;
  const SpinHamiltonian hn = normalized(h, 0.0);
  for (const auto& str : hn.terms) {
    // pair off X/Y letters in ascending site order; Z letters inside a pair's
    // gap belong to the string tail, Z letters outside stay as local factors
    std::vector<std::pair<int, char>> letters(str.letters.begin(), str.letters.end());
    std::vector<int> xy_sites;
    for (const auto& [site, l] : letters)
      if (l != 'Z') xy_sites.push_back(site);
    if (xy_sites.size() % 2 != 0)
      throw NonLocalizable("string with an odd number of X/Y letters has no even fermionic image");

    // factor kinds: 0/1 -> Majorana b[2s + kind], 2 -> local 2n_s - 1
    std::vector<std::pair<int, int>> factors;
    std::map<int, char> inside;
    for (size_t p = 0; p + 1 < xy_sites.size(); p += 2) {
      const int lo = xy_sites[p];
      const int hi = xy_sites[p + 1];
      for (int m = lo + 1; m < hi; ++m) {
        // a letter-free site inside the gap is a hole where the string tail
        // met a density factor; reinsert the 2n - 1 to cancel the tail
        if (str.letters.find(m) == str.letters.end())
          factors.push_back({m, 2});
        else
          inside.emplace(m, 'Z');
      }
      // the partner's Z tail crosses lo and flips its visible letter, so the
      // factor kind at lo is the opposite of the one read off the string
      factors.push_back({lo, str.letters.at(lo) == 'X' ? 1 : 0});
      factors.push_back({hi, str.letters.at(hi) == 'X' ? 0 : 1});
    }
    for (const auto& [site, l] : letters)
      if (l == 'Z' && inside.find(site) == inside.end()) factors.push_back({site, 2});
    std::sort(factors.begin(), factors.end());

    // forward-map the candidate factor product; the phase mismatch against the
    // input fixes the fermionic coefficient exactly
    PauliString image;
    image.coeff = cplx(1.0, 0.0);
    for (const auto& [site, kind] : factors) {
      const PauliString f = (kind == 2) ? z_string(site) : majorana_string(2 * site + kind);
      image = mul_strings(image, f);
    }
    if (image.letters != str.letters)
      throw NonLocalizable("string does not factor into chain-ordered Majorana pairs");
    const cplx scale = str.coeff / image.coeff;

    // expand Majorana and parity factors into ladder monomials
    std::vector<std::pair<cplx, Monomial>> expanded;
    expanded.push_back({scale, {}});
    for (const auto& [site, kind] : factors) {
      std::vector<std::pair<cplx, Monomial>> choices;
      if (kind == 0) {
        choices.push_back({cplx(1.0, 0.0), {{site, false}}});
        choices.push_back({cplx(1.0, 0.0), {{site, true}}});
      } else if (kind == 1) {
        choices.push_back({cplx(0.0, 1.0), {{site, true}}});
        choices.push_back({cplx(0.0, -1.0), {{site, false}}});
      } else {
        choices.push_back({cplx(2.0, 0.0), {{site, true}, {site, false}}});
        choices.push_back({cplx(-1.0, 0.0), {}});
      }
      std::vector<std::pair<cplx, Monomial>> next;
      next.reserve(expanded.size() * choices.size());
      for (const auto& [c, mono] : expanded)
        for (const auto& [cc, cm] : choices) {
          Monomial joined = mono;
          joined.insert(joined.end(), cm.begin(), cm.end());
          next.push_back({c * cc, std::move(joined)});
        }
      expanded = std::move(next);
    }
    for (auto& [c, mono] : expanded) {
      if (std::abs(c) <= 1e-15) continue;
      out.push_back(InteractionTerm::raw(c, mono));
    }
  }
  return out;
}

CMat spin_matrix(const SpinHamiltonian& h) {
  if (h.L < 1 || h.L > 12)
    throw ConfigError("dense spin matrix supported for 1 <= L <= 12");
  const std::size_t dim = std::size_t(1) << h.L;
  CMat m = CMat::Zero(dim, dim);
  for (const auto& str : h.terms) {
    for (const auto& [site, l] : str.letters) {
      (void)l;
      if (site < 0 || site >= h.L)
        throw ConfigError("letter site " + std::to_string(site) + " outside chain of length " +
                          std::to_string(h.L));
    }
    std::size_t flip = 0;
    for (const auto& [site, l] : str.letters)
      if (l != 'Z') flip |= std::size_t(1) << site;
    for (std::size_t s = 0; s < dim; ++s) {
      cplx amp = str.coeff;
      for (const auto& [site, l] : str.letters) {
        const bool occ = (s >> site) & 1u;
        if (l == 'Z') {
          if (!occ) amp = -amp;
        } else if (l == 'Y') {
          // Y maps |0> to -i|1> and |1> to i|0> in the occupation basis
          amp *= occ ? cplx(0.0, 1.0) : cplx(0.0, -1.0);
        }
      }
      m(s ^ flip, s) += amp;
    }
  }
  return m;
}

std::string to_lines(const SpinHamiltonian& h) {
  std::ostringstream os;
  for (const auto& str : h.terms) {
    os << format_coeff(str.coeff);
    bool first = true;
    for (const auto& [site, l] : str.letters) {
      os << (first ? "  " : " ") << l << site;
      first = false;
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace chainz2
