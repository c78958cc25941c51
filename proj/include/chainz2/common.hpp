#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace chainz2 {

using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using cplx = std::complex<double>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OddDimension : Error { using Error::Error; };
struct NotSkewSymmetric : Error { using Error::Error; };
struct NonHermitian : Error { using Error::Error; };
struct NotParticleHoleSymmetric : Error { using Error::Error; };
struct GaplessHamiltonian : Error { using Error::Error; };
struct GaplessEndpoint : Error { using Error::Error; };
struct PartitionFailure : Error { using Error::Error; };
struct QuarticNotQuadratic : Error { using Error::Error; };
struct OddParity : Error { using Error::Error; };
struct ParameterOutOfDomain : Error { using Error::Error; };
struct WraparoundTerm : Error { using Error::Error; };
struct NonLocalizable : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

// spectral norm; 1 for the zero matrix so relative tolerances stay meaningful
double rel_scale(const Mat& a);
double rel_scale(const CMat& a);

}  // namespace chainz2
