#include "chainz2/z2flow.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace chainz2 {

namespace {

double min_singular(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  const Vec s = svd.singularValues();
  return s(s.size() - 1);
}

double spectral_norm(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

HamiltonianPath::HamiltonianPath(Sampler sampler, std::vector<double> grid,
                                 double gap_tol)
    : sampler_(std::move(sampler)), grid_(std::move(grid)), gap_tol_(gap_tol) {
  if (grid_.size() < 2) throw ConfigError("path grid needs at least 2 samples");
  std::sort(grid_.begin(), grid_.end());
  for (double t : {grid_.front(), grid_.back()}) {
    const Mat a = sampler_(t).entries();
    const double top = std::max(spectral_norm(a), 1.0);
    if (min_singular(a) <= gap_tol_ * top)
      throw GaplessEndpoint("path endpoint is gapless");
  }
}

Z2Report ind2(const ComplexStructure& j0, const ComplexStructure& j1,
              double tol) {
  if (j0.j.rows() != j1.j.rows())
    throw ConfigError("complex structures must have equal dimension");
  const Mat sum = j0.j + j1.j;
  const int kd = kernel_dim(SkewMatrix(sum), tol);
  Z2Report rep;
  rep.tol = tol;
  rep.kernel_counts = {kd};
  rep.sign = ((kd / 2) % 2 == 0) ? 1 : -1;
  return rep;
}

int sf2_endpoints(const SkewMatrix& a0, const SkewMatrix& a1, double tol) {
  for (const SkewMatrix* a : {&a0, &a1}) {
    const double top = std::max(spectral_norm(a->entries()), 1.0);
    if (min_singular(a->entries()) <= tol * top)
      throw GaplessEndpoint("endpoint is gapless");
  }
  const double p0 = pfaffian(a0);
  const double p1 = pfaffian(a1);
  return ((p0 >= 0.0) == (p1 >= 0.0)) ? 1 : -1;
}

Z2Report sf2_path(const HamiltonianPath& path, double tol, int max_refine) {
  struct Node {
    double t;
    Mat j;
  };
  auto eval = [&](double t) -> Node {
    return {t, flatten(path.at(t), path.gap_tol(), true).j};
  };

  // singular values of J_l + J_r lie in [0, 2]; the pair is resolved once
  // every value sits in an outer band, and the low band then counts the
  // dimension flipped between the two structures.  Flips stay at distance
  // 2 under bisection while rotations shrink with the spacing, so
  // resolving, not closeness, is the right stopping rule
  auto classify = [](const Node& l, const Node& r, int& flips) {
    Eigen::JacobiSVD<Mat> svd(l.j + r.j);
    const Vec s = svd.singularValues();
    flips = 0;
    bool resolved = true;
    for (int i = 0; i < s.size(); ++i) {
      if (s(i) < 0.2)
        ++flips;
      else if (s(i) <= 1.8)
        resolved = false;
    }
    return resolved;
  };

  std::vector<Node> nodes;
  nodes.reserve(path.grid().size());
  for (double t : path.grid()) nodes.push_back(eval(t));

  for (int round = 0;; ++round) {
    bool ok = true;
    std::vector<Node> refined;
    refined.reserve(nodes.size() * 2);
    refined.push_back(nodes.front());
    for (size_t i = 1; i < nodes.size(); ++i) {
      int flips = 0;
      if (!classify(nodes[i - 1], nodes[i], flips)) {
        refined.push_back(eval(0.5 * (nodes[i - 1].t + nodes[i].t)));
        ok = false;
      }
      refined.push_back(nodes[i]);
    }
    if (ok) break;
    if (round >= max_refine)
      throw PartitionFailure("partition refinement exceeded max_refine");
    nodes = std::move(refined);
  }

  Z2Report rep;
  rep.tol = tol;
  int sign = 1;
  const double span = nodes.back().t - nodes.front().t;
  const double loc = std::max(tol, 1e-7) * std::max(span, 1.0);
  for (size_t i = 1; i < nodes.size(); ++i) {
    int flips = 0;
    classify(nodes[i - 1], nodes[i], flips);
    rep.kernel_counts.push_back(flips);
    if ((flips / 2) % 2 != 0) sign = -sign;
    if (flips > 0) {
      Node lo = nodes[i - 1];
      Node hi = nodes[i];
      while (hi.t - lo.t > loc) {
        Node mid = eval(0.5 * (lo.t + hi.t));
        int fl = 0;
        if (!classify(lo, mid, fl)) break;
        if (fl > 0)
          hi = std::move(mid);
        else
          lo = std::move(mid);
      }
      rep.crossings.push_back(0.5 * (lo.t + hi.t));
    }
  }
  for (const Node& n : nodes) rep.partition.push_back(n.t);
  rep.sign = sign;
  return rep;
}

Z2Report relative_index(const BdGMatrix& h0, const BdGMatrix& h1, double tol,
                        bool complete_kernel) {
  const Mat j0 = flatten(h0, tol, complete_kernel).j;
  const Mat j1 = flatten(h1, tol, complete_kernel).j;
  Z2Report rep = ind2(ComplexStructure{j0}, ComplexStructure{j1}, tol);

  // diagnostic: Hilbert-Schmidt distance of the spectral projections,
  // meaningful when the pair differs only in a local region
  auto projector = [](const BdGMatrix& h) {
    Eigen::SelfAdjointEigenSolver<CMat> es(h.matrix());
    const Vec ev = es.eigenvalues();
    const CMat u = es.eigenvectors();
    const double scale = std::max(ev.cwiseAbs().maxCoeff(), 1.0);
    CMat e = CMat::Zero(h.matrix().rows(), h.matrix().cols());
    for (int k = 0; k < ev.size(); ++k)
      if (ev(k) > 1e-12 * scale) e += u.col(k) * u.col(k).adjoint();
    return e;
  };
  rep.hs_norm = (projector(h0) - projector(h1)).norm();
  return rep;
}

}  // namespace chainz2
