#ifndef MCOMPTON_DIRAC_HPP
#define MCOMPTON_DIRAC_HPP

#include <array>
#include <complex>

#include "mcompton/fourvector.hpp"

namespace mcompton {

using cplx = std::complex<double>;

/**
 * Dense complex 4x4 matrix in row-major storage.
 *
 * This is the workhorse of the amplitude evaluation; everything is kept at
 * fixed size four so the compiler can unroll the products.  No attempt is
 * made at a general linear-algebra abstraction.
 */
struct DiracMatrix {
  std::array<cplx, 16> m{};

  cplx& operator()(int r, int c) { return m[4 * r + c]; }
  const cplx& operator()(int r, int c) const { return m[4 * r + c]; }

  DiracMatrix operator+(const DiracMatrix& o) const {
    DiracMatrix out;
    for (int i = 0; i < 16; ++i) out.m[i] = m[i] + o.m[i];
    return out;
  }
  DiracMatrix operator-(const DiracMatrix& o) const {
    DiracMatrix out;
    for (int i = 0; i < 16; ++i) out.m[i] = m[i] - o.m[i];
    return out;
  }
  DiracMatrix operator*(cplx s) const {
    DiracMatrix out;
    for (int i = 0; i < 16; ++i) out.m[i] = m[i] * s;
    return out;
  }

  DiracMatrix operator*(const DiracMatrix& o) const {
    DiracMatrix out;
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) {
        cplx acc{0.0, 0.0};
        for (int k = 0; k < 4; ++k) acc += m[4 * r + k] * o.m[4 * k + c];
        out.m[4 * r + c] = acc;
      }
    }
    return out;
  }
};

/** Column bispinor. */
struct Bispinor {
  std::array<cplx, 4> c{};
};

/** Row bispinor, i.e. a Dirac adjoint ready to close a spinor chain. */
struct AdjointBispinor {
  std::array<cplx, 4> c{};
};

inline DiracMatrix identity_matrix() {
  DiracMatrix out;
  for (int i = 0; i < 4; ++i) out(i, i) = 1.0;
  return out;
}

// gamma^mu in the Dirac representation, mu = 0..3
DiracMatrix gamma(int mu);

// Feynman slash a0*gamma^0 - a.gamma; assembled entrywise, no matrix products
DiracMatrix feynman_slash(const FourVector& a);
DiracMatrix feynman_slash(const ComplexFourVector& a);

/**
 * Free-particle bispinor u_r(p), r in {1,2}, normalized to ubar_r u_r = 1.
 * p must be on shell with positive energy; mass is taken from p itself.
 */
Bispinor bispinor(const FourVector& p, int r);

// ubar = u^dagger gamma^0
AdjointBispinor dirac_adjoint(const Bispinor& u);

inline Bispinor matvec(const DiracMatrix& a, const Bispinor& v) {
  Bispinor out;
  for (int r = 0; r < 4; ++r) {
    out.c[r] = a.m[4 * r + 0] * v.c[0] + a.m[4 * r + 1] * v.c[1] +
               a.m[4 * r + 2] * v.c[2] + a.m[4 * r + 3] * v.c[3];
  }
  return out;
}

// row * column contraction closing a chain
inline cplx contract(const AdjointBispinor& ubar, const Bispinor& v) {
  return ubar.c[0] * v.c[0] + ubar.c[1] * v.c[1] + ubar.c[2] * v.c[2] + ubar.c[3] * v.c[3];
}

}  // namespace mcompton

#endif
