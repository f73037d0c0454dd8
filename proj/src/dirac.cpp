#include "mcompton/dirac.hpp"

#include <cmath>
#include <stdexcept>

namespace mcompton {

namespace {
constexpr cplx I{0.0, 1.0};
}

DiracMatrix gamma(int mu) {
  DiracMatrix g;
  switch (mu) {
    case 0:
      g(0, 0) = 1.0; g(1, 1) = 1.0; g(2, 2) = -1.0; g(3, 3) = -1.0;
      break;
    case 1:
      g(0, 3) = 1.0; g(1, 2) = 1.0; g(2, 1) = -1.0; g(3, 0) = -1.0;
      break;
    case 2:
      g(0, 3) = -I; g(1, 2) = I; g(2, 1) = I; g(3, 0) = -I;
      break;
    case 3:
      g(0, 2) = 1.0; g(1, 3) = -1.0; g(2, 0) = -1.0; g(3, 1) = 1.0;
      break;
    default:
      throw std::invalid_argument("gamma: mu must be 0..3");
  }
  return g;
}

DiracMatrix feynman_slash(const FourVector& a) {
  // a0*gamma^0 - ax*gamma^1 - ay*gamma^2 - az*gamma^3, written out entrywise
  DiracMatrix s;
  const cplx am{a.x, -a.y};  // ax - i ay
  const cplx ap{a.x, a.y};   // ax + i ay
  s(0, 0) = a.t;  s(0, 2) = -a.z; s(0, 3) = -am;
  s(1, 1) = a.t;  s(1, 2) = -ap;  s(1, 3) = a.z;
  s(2, 0) = a.z;  s(2, 1) = am;   s(2, 2) = -a.t;
  s(3, 0) = ap;   s(3, 1) = -a.z; s(3, 3) = -a.t;
  return s;
}

DiracMatrix feynman_slash(const ComplexFourVector& a) {
  DiracMatrix s;
  const cplx am = a.x - I * a.y;
  const cplx ap = a.x + I * a.y;
  s(0, 0) = a.t;  s(0, 2) = -a.z; s(0, 3) = -am;
  s(1, 1) = a.t;  s(1, 2) = -ap;  s(1, 3) = a.z;
  s(2, 0) = a.z;  s(2, 1) = am;   s(2, 2) = -a.t;
  s(3, 0) = ap;   s(3, 1) = -a.z; s(3, 3) = -a.t;
  return s;
}

Bispinor bispinor(const FourVector& p, int r) {
  if (r != 1 && r != 2) throw std::invalid_argument("bispinor: r must be 1 or 2");
  const double m = std::sqrt(minkowski_norm2(p));
  const double epm = p.t + m;  // E + m, positive for physical p
  const double norm = std::sqrt(epm / (2.0 * m));
  // lower components are (sigma.p / (E+m)) acting on the Pauli spinor
  const cplx pp{p.x, p.y};   // px + i py
  const cplx pm{p.x, -p.y};  // px - i py
  Bispinor u;
  if (r == 1) {
    u.c[0] = norm;
    u.c[1] = 0.0;
    u.c[2] = norm * p.z / epm;
    u.c[3] = norm * pp / epm;
  } else {
    u.c[0] = 0.0;
    u.c[1] = norm;
    u.c[2] = norm * pm / epm;
    u.c[3] = norm * (-p.z) / epm;
  }
  return u;
}

AdjointBispinor dirac_adjoint(const Bispinor& u) {
  AdjointBispinor ub;
  ub.c[0] = std::conj(u.c[0]);
  ub.c[1] = std::conj(u.c[1]);
  ub.c[2] = -std::conj(u.c[2]);
  ub.c[3] = -std::conj(u.c[3]);
  return ub;
}

}  // namespace mcompton
