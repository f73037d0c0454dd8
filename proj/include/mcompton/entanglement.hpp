#ifndef MCOMPTON_ENTANGLEMENT_HPP
#define MCOMPTON_ENTANGLEMENT_HPP

#include <array>
#include <complex>

#include "mcompton/amplitudes.hpp"

namespace mcompton {

/**
 * 8x8 complex matrix, row-major, for three-photon polarization states.
 * Basis index b = 4*(lambda1-1) + 2*(lambda2-1) + (lambda3-1): photon 1 is
 * the most significant bit, matching the channel-table layout.
 */
struct Matrix8 {
  std::array<cplx, 64> a{};

  cplx& operator()(int r, int c) { return a[static_cast<std::size_t>(r * 8 + c)]; }
  const cplx& operator()(int r, int c) const { return a[static_cast<std::size_t>(r * 8 + c)]; }

  static Matrix8 zero() { return {}; }
  static Matrix8 identity() {
    Matrix8 m;
    for (int i = 0; i < 8; ++i) m(i, i) = 1.0;
    return m;
  }
};

Matrix8 operator+(const Matrix8& x, const Matrix8& y);
Matrix8 operator-(const Matrix8& x, const Matrix8& y);
Matrix8 operator*(double s, const Matrix8& x);
Matrix8 operator*(const Matrix8& x, const Matrix8& y);
Matrix8 adjoint(const Matrix8& x);
cplx trace(const Matrix8& x);
double frobenius_distance(const Matrix8& x, const Matrix8& y);

/** Transpose the photon subsystems selected by mask (bit 2 = photon 1,
 *  bit 1 = photon 2, bit 0 = photon 3). */
Matrix8 partial_transpose(const Matrix8& m, unsigned mask);

/** Bipartition subsets {1},{2},{3},{12},{13},{23} as basis-bit masks. */
inline constexpr std::array<unsigned, 6> bipartition_masks = {4u, 2u, 1u, 6u, 5u, 3u};

/**
 * Normalized polarization density matrix of the emitted triple for one
 * incoming polarization, electron spins summed.  Throws ValidationError if
 * the table carries no weight (all amplitudes zero or non-finite).
 */
Matrix8 density_matrix(const TcChannelTable& table, int lambda0);

/** Same, for one fixed (r_i, r_f) spin channel. */
Matrix8 density_matrix_fixed_spins(const TcChannelTable& table, int lambda0, int r_i, int r_f);

/** |b><b| for one computational basis state. */
Matrix8 basis_projector(int b);

/** (|0> + |7>)/sqrt(2) projector, the maximally entangled reference point. */
Matrix8 ghz_projector();

struct Eigensystem8 {
  std::array<double, 8> values{};  // descending
  Matrix8 vectors;                 // columns, matching values
};

/** Eigendecomposition of a Hermitian matrix (cyclic complex Jacobi). */
Eigensystem8 hermitian_eigensystem(const Matrix8& m);

/** -sum u log2 u over the spectrum; tiny negatives from roundoff clamp to 0. */
double von_neumann_entropy(const Matrix8& rho);

double purity(const Matrix8& rho);

/**
 * Witness decomposition certificate: for every bipartition s,
 *   W = P_s + PT_s(Q_s),   0 <= P_s <= 1,   0 <= Q_s <= 1.
 * Any such W satisfies tr(W rho) >= 0 on states separable across some
 * bipartition, so -tr(W rho) > 0 certifies genuine tripartite entanglement.
 */
struct WitnessCertificate {
  Matrix8 w;
  std::array<Matrix8, 6> p;  // ordered as bipartition_masks
  std::array<Matrix8, 6> q;
};

struct CertificateCheck {
  bool ok = false;
  double max_spectrum_violation = 0.0;     // distance of any P/Q eigenvalue from [0,1]
  double max_reconstruction_error = 0.0;   // max-norm of W - P_s - PT_s(Q_s)
};

CertificateCheck verify_certificate(const WitnessCertificate& cert, double tol);

double witness_expectation(const Matrix8& w, const Matrix8& rho);

/** Closed-form optimal certificate for the GHZ projector: W = 1 - (3/2) rho. */
WitnessCertificate ghz_certificate();

struct TauOptions {
  double gap_tol = 2e-8;      // certified duality-gap bound at the final stage
  double t_start = 4.0;
  double t_growth = 8.0;
  int max_newton_per_stage = 60;
  double decrement_tol = 1e-10;  // squared Newton decrement, affine invariant
};

struct TauResult {
  double tau = 0.0;        // max(objective, 0)
  double objective = 0.0;  // -tr(W rho) at the solver's final interior point
  bool converged = false;
  int newton_steps = 0;
  WitnessCertificate cert;
};

/**
 * Genuine tripartite entanglement by semidefinite optimization:
 * maximize -tr(W rho) over witnesses decomposable against all six
 * bipartitions.  0 for (mixtures of) biseparable states, 1/2 for GHZ.
 * The returned objective is always a valid lower bound because the iterate
 * stays strictly feasible.
 */
TauResult genuine_entanglement_tau(const Matrix8& rho, const TauOptions& opt = {});

}  // namespace mcompton

#endif
