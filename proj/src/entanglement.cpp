#include "mcompton/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "mcompton/errors.hpp"

namespace mcompton {

Matrix8 operator+(const Matrix8& x, const Matrix8& y) {
  Matrix8 r;
  for (std::size_t i = 0; i < 64; ++i) r.a[i] = x.a[i] + y.a[i];
  return r;
}

Matrix8 operator-(const Matrix8& x, const Matrix8& y) {
  Matrix8 r;
  for (std::size_t i = 0; i < 64; ++i) r.a[i] = x.a[i] - y.a[i];
  return r;
}

Matrix8 operator*(double s, const Matrix8& x) {
  Matrix8 r;
  for (std::size_t i = 0; i < 64; ++i) r.a[i] = s * x.a[i];
  return r;
}

Matrix8 operator*(const Matrix8& x, const Matrix8& y) {
  Matrix8 r;
  for (int i = 0; i < 8; ++i)
    for (int k = 0; k < 8; ++k) {
      const cplx xik = x(i, k);
      if (xik == cplx{}) continue;
      for (int j = 0; j < 8; ++j) r(i, j) += xik * y(k, j);
    }
  return r;
}

Matrix8 adjoint(const Matrix8& x) {
  Matrix8 r;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) r(i, j) = std::conj(x(j, i));
  return r;
}

cplx trace(const Matrix8& x) {
  cplx t{};
  for (int i = 0; i < 8; ++i) t += x(i, i);
  return t;
}

double frobenius_distance(const Matrix8& x, const Matrix8& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < 64; ++i) s += std::norm(x.a[i] - y.a[i]);
  return std::sqrt(s);
}

Matrix8 partial_transpose(const Matrix8& m, unsigned mask) {
  Matrix8 r;
  for (unsigned row = 0; row < 8; ++row)
    for (unsigned col = 0; col < 8; ++col) {
      const unsigned nr = (row & ~mask) | (col & mask);
      const unsigned nc = (col & ~mask) | (row & mask);
      r(static_cast<int>(nr), static_cast<int>(nc)) =
          m(static_cast<int>(row), static_cast<int>(col));
    }
  return r;
}

namespace {

void accumulate_outer(Matrix8& rho, const std::array<cplx, 8>& v) {
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) rho(r, c) += v[static_cast<std::size_t>(r)] *
                                             std::conj(v[static_cast<std::size_t>(c)]);
}

std::array<cplx, 8> amplitude_vector(const TcChannelTable& table, int lambda0, int r_i,
                                     int r_f) {
  std::array<cplx, 8> v;
  for (int b = 0; b < 8; ++b)
    v[static_cast<std::size_t>(b)] =
        table.at(r_i, r_f, lambda0, 1 + ((b >> 2) & 1), 1 + ((b >> 1) & 1), 1 + (b & 1));
  return v;
}

Matrix8 normalize_state(Matrix8 rho) {
  const double tr = trace(rho).real();
  if (!(tr > 0.0) || !std::isfinite(tr))
    throw ValidationError("polarization state has no weight");
  return (1.0 / tr) * rho;
}

}  // namespace

Matrix8 density_matrix(const TcChannelTable& table, int lambda0) {
  Matrix8 rho;
  for (int r_i = 1; r_i <= 2; ++r_i)
    for (int r_f = 1; r_f <= 2; ++r_f)
      accumulate_outer(rho, amplitude_vector(table, lambda0, r_i, r_f));
  return normalize_state(rho);
}

Matrix8 density_matrix_fixed_spins(const TcChannelTable& table, int lambda0, int r_i,
                                   int r_f) {
  Matrix8 rho;
  accumulate_outer(rho, amplitude_vector(table, lambda0, r_i, r_f));
  return normalize_state(rho);
}

Matrix8 basis_projector(int b) {
  Matrix8 r;
  r(b, b) = 1.0;
  return r;
}

Matrix8 ghz_projector() {
  Matrix8 r;
  r(0, 0) = r(0, 7) = r(7, 0) = r(7, 7) = 0.5;
  return r;
}

// ---------------------------------------------------------------------------
// Hermitian eigensystem: cyclic complex Jacobi.  Each rotation first strips
// the phase of the pivot, then applies the classic symmetric 2x2 rotation.

Eigensystem8 hermitian_eigensystem(const Matrix8& m) {
  Matrix8 a = m;
  Matrix8 v = Matrix8::identity();
  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = 0.0, diag = 0.0;
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) (i == j ? diag : off) += std::norm(a(i, j));
    if (off <= 1e-30 * (diag + 1e-300)) break;
    for (int p = 0; p < 8; ++p)
      for (int q = p + 1; q < 8; ++q) {
        const cplx apq = a(p, q);
        const double r = std::abs(apq);
        if (r < 1e-300) continue;
        const cplx phase = apq / r;  // apq = r * phase
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * r);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::hypot(1.0, tau));
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = t * c;
        // J is identity outside the (p,q) block:
        //   J(p,p) = c, J(p,q) = s, J(q,p) = -s conj(phase), J(q,q) = c conj(phase)
        const cplx jqp = -s * std::conj(phase);
        const cplx jqq = c * std::conj(phase);
        for (int i = 0; i < 8; ++i) {  // A <- A J, V <- V J
          const cplx aip = a(i, p), aiq = a(i, q);
          a(i, p) = c * aip + jqp * aiq;
          a(i, q) = s * aip + jqq * aiq;
          const cplx vip = v(i, p), viq = v(i, q);
          v(i, p) = c * vip + jqp * viq;
          v(i, q) = s * vip + jqq * viq;
        }
        for (int j = 0; j < 8; ++j) {  // A <- J^dagger A
          const cplx apj = a(p, j), aqj = a(q, j);
          a(p, j) = c * apj + std::conj(jqp) * aqj;
          a(q, j) = s * apj + std::conj(jqq) * aqj;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
      }
  }
  Eigensystem8 out;
  std::array<int, 8> order{0, 1, 2, 3, 4, 5, 6, 7};
  std::array<double, 8> vals;
  for (int i = 0; i < 8; ++i) vals[static_cast<std::size_t>(i)] = a(i, i).real();
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return vals[static_cast<std::size_t>(x)] >
                                       vals[static_cast<std::size_t>(y)]; });
  for (int i = 0; i < 8; ++i) {
    out.values[static_cast<std::size_t>(i)] = vals[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
    for (int r = 0; r < 8; ++r) out.vectors(r, i) = v(r, order[static_cast<std::size_t>(i)]);
  }
  return out;
}

double von_neumann_entropy(const Matrix8& rho) {
  const Eigensystem8 eig = hermitian_eigensystem(rho);
  double q = 0.0;
  for (double u : eig.values) {
    if (u <= 1e-300) continue;  // 0 log 0 = 0; tiny negatives from roundoff too
    q -= u * std::log2(u);
  }
  return q;
}

double purity(const Matrix8& rho) {
  double s = 0.0;
  for (const cplx& z : rho.a) s += std::norm(z);
  return s;
}

double witness_expectation(const Matrix8& w, const Matrix8& rho) {
  cplx t{};
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) t += w(i, j) * rho(j, i);
  return t.real();
}

// ---------------------------------------------------------------------------
// Certificate checking

CertificateCheck verify_certificate(const WitnessCertificate& cert, double tol) {
  CertificateCheck out;
  for (std::size_t s = 0; s < 6; ++s) {
    for (const Matrix8* blk : {&cert.p[s], &cert.q[s]}) {
      const Eigensystem8 eig = hermitian_eigensystem(*blk);
      for (double u : eig.values) {
        const double viol = std::max(-u, u - 1.0);
        out.max_spectrum_violation = std::max(out.max_spectrum_violation, viol);
      }
    }
    const Matrix8 rebuilt = cert.p[s] + partial_transpose(cert.q[s], bipartition_masks[s]);
    for (std::size_t i = 0; i < 64; ++i)
      out.max_reconstruction_error =
          std::max(out.max_reconstruction_error, std::abs(cert.w.a[i] - rebuilt.a[i]));
  }
  out.ok = out.max_spectrum_violation <= tol && out.max_reconstruction_error <= tol;
  return out;
}

WitnessCertificate ghz_certificate() {
  const Matrix8 ghz = ghz_projector();
  const Matrix8 one = Matrix8::identity();
  WitnessCertificate cert;
  cert.w = one - 1.5 * ghz;
  for (std::size_t s = 0; s < 6; ++s) {
    cert.p[s] = 0.5 * (one - ghz);
    cert.q[s] = 0.5 * one - partial_transpose(ghz, bipartition_masks[s]);
  }
  return cert;
}

// ---------------------------------------------------------------------------
// Interior-point machinery.
//
// Hermitian 8x8 matrices live in a 64-dimensional real coordinate space over
// the orthonormal basis {e_ii} u {(e_ij+e_ji)/sqrt2} u {i(e_ij-e_ji)/sqrt2}.
// In these coordinates tr(AB) of two Hermitians is the Euclidean dot product,
// a partial transpose is a signed involutive permutation, and the Hessian of
// -log det at X is the Gram matrix K_ab = tr(X^-1 E_a X^-1 E_b).

namespace {

using Vec64 = std::array<double, 64>;

struct Mat64 {
  std::array<double, 4096> a{};
  double& operator()(int r, int c) { return a[static_cast<std::size_t>(r * 64 + c)]; }
  double operator()(int r, int c) const { return a[static_cast<std::size_t>(r * 64 + c)]; }
};

int pair_rank(int i, int j) {  // i < j
  return i * 7 - i * (i - 1) / 2 + j - i - 1;
}

constexpr double kInvSqrt2 = 0.70710678118654752440;

Vec64 vec_coords(const Matrix8& m) {
  Vec64 x{};
  for (int i = 0; i < 8; ++i) x[static_cast<std::size_t>(i)] = m(i, i).real();
  for (int i = 0; i < 8; ++i)
    for (int j = i + 1; j < 8; ++j) {
      const int base = 8 + 2 * pair_rank(i, j);
      const cplx z = m(i, j);
      x[static_cast<std::size_t>(base)] = 2.0 * kInvSqrt2 * z.real();
      x[static_cast<std::size_t>(base + 1)] = 2.0 * kInvSqrt2 * z.imag();
    }
  return x;
}

Matrix8 unvec_coords(const Vec64& x) {
  Matrix8 m;
  for (int i = 0; i < 8; ++i) m(i, i) = x[static_cast<std::size_t>(i)];
  for (int i = 0; i < 8; ++i)
    for (int j = i + 1; j < 8; ++j) {
      const int base = 8 + 2 * pair_rank(i, j);
      const cplx z{kInvSqrt2 * x[static_cast<std::size_t>(base)],
                   kInvSqrt2 * x[static_cast<std::size_t>(base + 1)]};
      m(i, j) = z;
      m(j, i) = std::conj(z);
    }
  return m;
}

double dot64(const Vec64& x, const Vec64& y) {
  double s = 0.0;
  for (int i = 0; i < 64; ++i) s += x[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
  return s;
}

// Partial transpose as a signed permutation of the coordinate basis.
// PT maps e_ij -> e_i'j' by swapping the masked bits of the index pair, so a
// basis pair element either keeps its orientation (+1) or flips it, which
// negates the imaginary element.
struct SignedPerm {
  std::array<int, 64> perm{};
  std::array<double, 64> sign{};
};

SignedPerm build_pt_perm(unsigned mask) {
  SignedPerm sp;
  for (int i = 0; i < 8; ++i) {
    sp.perm[static_cast<std::size_t>(i)] = i;
    sp.sign[static_cast<std::size_t>(i)] = 1.0;
  }
  for (unsigned i = 0; i < 8; ++i)
    for (unsigned j = i + 1; j < 8; ++j) {
      const int base = 8 + 2 * pair_rank(static_cast<int>(i), static_cast<int>(j));
      const unsigned ni = (i & ~mask) | (j & mask);
      const unsigned nj = (j & ~mask) | (i & mask);
      const unsigned lo = std::min(ni, nj), hi = std::max(ni, nj);
      const int nbase = 8 + 2 * pair_rank(static_cast<int>(lo), static_cast<int>(hi));
      const bool flipped = ni > nj;
      sp.perm[static_cast<std::size_t>(base)] = nbase;
      sp.sign[static_cast<std::size_t>(base)] = 1.0;
      sp.perm[static_cast<std::size_t>(base + 1)] = nbase + 1;
      sp.sign[static_cast<std::size_t>(base + 1)] = flipped ? -1.0 : 1.0;
    }
  return sp;
}

// PT is involutive and self-adjoint under tr(AB), so applying the stored
// involution with its signs is both P-hat and its transpose.
Vec64 apply_perm(const SignedPerm& sp, const Vec64& x) {
  Vec64 y;
  for (int a = 0; a < 64; ++a)
    y[static_cast<std::size_t>(a)] = sp.sign[static_cast<std::size_t>(a)] *
                                     x[static_cast<std::size_t>(sp.perm[static_cast<std::size_t>(a)])];
  return y;
}

void conj_perm_add(const SignedPerm& sp, const Mat64& k, Mat64& out) {
  // out += P-hat K P-hat
  for (int a = 0; a < 64; ++a)
    for (int b = 0; b < 64; ++b)
      out(a, b) += sp.sign[static_cast<std::size_t>(a)] * sp.sign[static_cast<std::size_t>(b)] *
                   k(sp.perm[static_cast<std::size_t>(a)], sp.perm[static_cast<std::size_t>(b)]);
}

// Row a of the result is vec(X E_a X) + vec(Y E_a Y): the barrier Hessian for
// the pair of constraints {P >= 0, P <= 1} with X = P^-1, Y = (1-P)^-1.
void sandwich_row(const Matrix8& x, int a, Matrix8& c) {
  if (a < 8) {
    for (int u = 0; u < 8; ++u)
      for (int w = 0; w < 8; ++w) c(u, w) += x(u, a) * x(a, w);
    return;
  }
  int rank = (a - 8) / 2;
  const bool imag_part = ((a - 8) & 1) != 0;
  int i = 0;
  while (rank >= 7 - i) {
    rank -= 7 - i;
    ++i;
  }
  const int j = i + 1 + rank;
  if (!imag_part) {
    for (int u = 0; u < 8; ++u)
      for (int w = 0; w < 8; ++w)
        c(u, w) += kInvSqrt2 * (x(u, i) * x(j, w) + x(u, j) * x(i, w));
  } else {
    const cplx im{0.0, 1.0};
    for (int u = 0; u < 8; ++u)
      for (int w = 0; w < 8; ++w)
        c(u, w) += im * kInvSqrt2 * (x(u, i) * x(j, w) - x(u, j) * x(i, w));
  }
}

Mat64 barrier_hessian(const Matrix8& x, const Matrix8& y) {
  Mat64 k;
  for (int a = 0; a < 64; ++a) {
    Matrix8 c;
    sandwich_row(x, a, c);
    sandwich_row(y, a, c);
    const Vec64 row = vec_coords(c);
    for (int b = 0; b < 64; ++b) k(a, b) = row[static_cast<std::size_t>(b)];
  }
  for (int a = 0; a < 64; ++a)  // symmetrize away roundoff
    for (int b = a + 1; b < 64; ++b) {
      const double v = 0.5 * (k(a, b) + k(b, a));
      k(a, b) = v;
      k(b, a) = v;
    }
  return k;
}

// complex Cholesky A = L L^dagger; false if not (numerically) positive definite
bool chol8(const Matrix8& a, Matrix8& l) {
  l = Matrix8{};
  for (int j = 0; j < 8; ++j) {
    double d = a(j, j).real();
    for (int k = 0; k < j; ++k) d -= std::norm(l(j, k));
    if (!(d > 0.0) || !std::isfinite(d)) return false;
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (int i = j + 1; i < 8; ++i) {
      cplx s = a(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / ljj;
    }
  }
  return true;
}

double logdet_from_chol(const Matrix8& l) {
  double s = 0.0;
  for (int j = 0; j < 8; ++j) s += std::log(l(j, j).real());
  return 2.0 * s;
}

Matrix8 inverse_from_chol(const Matrix8& l) {
  // forward-substitute L Z = I, then A^-1 = Z^dagger Z
  Matrix8 z;
  for (int col = 0; col < 8; ++col) {
    for (int i = col; i < 8; ++i) {
      cplx s = (i == col) ? cplx{1.0} : cplx{};
      for (int k = col; k < i; ++k) s -= l(i, k) * z(k, col);
      z(i, col) = s / l(i, i).real();
    }
  }
  Matrix8 inv;
  for (int r = 0; r < 8; ++r)
    for (int c = r; c < 8; ++c) {
      cplx s{};
      for (int k = std::max(r, c); k < 8; ++k) s += std::conj(z(k, r)) * z(k, c);
      inv(r, c) = s;
      inv(c, r) = std::conj(s);
    }
  return inv;
}

bool chol64(Mat64& a) {  // in place, lower triangle
  for (int j = 0; j < 64; ++j) {
    double d = a(j, j);
    for (int k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
    if (!(d > 0.0) || !std::isfinite(d)) return false;
    const double ljj = std::sqrt(d);
    a(j, j) = ljj;
    for (int i = j + 1; i < 64; ++i) {
      double s = a(i, j);
      for (int k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
      a(i, j) = s / ljj;
    }
  }
  return true;
}

void chol64_with_ridge(Mat64& a) {
  Mat64 saved = a;
  double avg_diag = 0.0;
  for (int i = 0; i < 64; ++i) avg_diag += saved(i, i);
  avg_diag = std::max(avg_diag / 64.0, 1e-300);
  double ridge = 0.0;
  for (int attempt = 0; attempt < 6; ++attempt) {
    if (chol64(a)) return;
    ridge = (ridge == 0.0) ? 1e-13 * avg_diag : 100.0 * ridge;
    a = saved;
    for (int i = 0; i < 64; ++i) a(i, i) += ridge;
  }
  throw SolverError("witness optimization: normal matrix not positive definite");
}

void chol64_solve_vec(const Mat64& l, Vec64& x) {
  for (int i = 0; i < 64; ++i) {
    double s = x[static_cast<std::size_t>(i)];
    for (int k = 0; k < i; ++k) s -= l(i, k) * x[static_cast<std::size_t>(k)];
    x[static_cast<std::size_t>(i)] = s / l(i, i);
  }
  for (int i = 63; i >= 0; --i) {
    double s = x[static_cast<std::size_t>(i)];
    for (int k = i + 1; k < 64; ++k) s -= l(k, i) * x[static_cast<std::size_t>(k)];
    x[static_cast<std::size_t>(i)] = s / l(i, i);
  }
}

void chol64_solve_mat(const Mat64& l, Mat64& b) {  // solves (L L^T) X = B in place
  for (int col = 0; col < 64; ++col) {
    for (int i = 0; i < 64; ++i) {
      double s = b(i, col);
      for (int k = 0; k < i; ++k) s -= l(i, k) * b(k, col);
      b(i, col) = s / l(i, i);
    }
    for (int i = 63; i >= 0; --i) {
      double s = b(i, col);
      for (int k = i + 1; k < 64; ++k) s -= l(k, i) * b(k, col);
      b(i, col) = s / l(i, i);
    }
  }
}

void matmul64(const Mat64& x, const Mat64& y, Mat64& out) {
  out = Mat64{};
  for (int i = 0; i < 64; ++i)
    for (int k = 0; k < 64; ++k) {
      const double xik = x(i, k);
      if (xik == 0.0) continue;
      for (int j = 0; j < 64; ++j) out(i, j) += xik * y(k, j);
    }
}

Vec64 matvec64(const Mat64& m, const Vec64& x) {
  Vec64 y{};
  for (int i = 0; i < 64; ++i) {
    double s = 0.0;
    for (int j = 0; j < 64; ++j) s += m(i, j) * x[static_cast<std::size_t>(j)];
    y[static_cast<std::size_t>(i)] = s;
  }
  return y;
}

struct BarrierState {
  Matrix8 w;
  std::array<Matrix8, 6> q;
};

struct BarrierEval {
  bool feasible = false;
  double logdet_sum = 0.0;
  // inverses, kept only when requested
  std::array<Matrix8, 6> inv_p, inv_1mp, inv_q, inv_1mq;
};

BarrierEval eval_barrier(const BarrierState& st, bool want_inverses) {
  BarrierEval ev;
  const Matrix8 one = Matrix8::identity();
  double logdet = 0.0;
  for (std::size_t s = 0; s < 6; ++s) {
    const Matrix8 p = st.w - partial_transpose(st.q[s], bipartition_masks[s]);
    Matrix8 l;
    if (!chol8(p, l)) return ev;
    logdet += logdet_from_chol(l);
    if (want_inverses) ev.inv_p[s] = inverse_from_chol(l);
    if (!chol8(one - p, l)) return ev;
    logdet += logdet_from_chol(l);
    if (want_inverses) ev.inv_1mp[s] = inverse_from_chol(l);
    if (!chol8(st.q[s], l)) return ev;
    logdet += logdet_from_chol(l);
    if (want_inverses) ev.inv_q[s] = inverse_from_chol(l);
    if (!chol8(one - st.q[s], l)) return ev;
    logdet += logdet_from_chol(l);
    if (want_inverses) ev.inv_1mq[s] = inverse_from_chol(l);
  }
  ev.feasible = true;
  ev.logdet_sum = logdet;
  return ev;
}

struct SolverWorkspace {
  std::array<Mat64, 6> kp;      // barrier Hessian of the P-blocks
  std::array<Mat64, 6> a_chol;  // Cholesky of K_P + P-hat K_Q P-hat
  std::array<Vec64, 6> gq;      // gradient wrt Q_s
  std::array<Vec64, 6> gq_tilde;
  Mat64 schur, tmp, prod;
};

}  // namespace

TauResult genuine_entanglement_tau(const Matrix8& rho_in, const TauOptions& opt) {
  // the optimization only sees the Hermitian part
  Matrix8 rho;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      rho(i, j) = 0.5 * (rho_in(i, j) + std::conj(rho_in(j, i)));
  const Vec64 rho_vec = vec_coords(rho);

  std::array<SignedPerm, 6> perms;
  for (std::size_t s = 0; s < 6; ++s) perms[s] = build_pt_perm(bipartition_masks[s]);

  BarrierState st;
  st.w = 0.5 * Matrix8::identity();
  for (auto& q : st.q) q = 0.25 * Matrix8::identity();

  auto ws = std::make_unique<SolverWorkspace>();
  constexpr double kBarrierNu = 192.0;  // 24 log-det barriers on 8x8 cones

  TauResult res;
  double t = opt.t_start;
  bool all_stages_centered = true;
  for (;;) {
    double last_decrement2 = std::numeric_limits<double>::infinity();
    bool stage_failed = false;
    try {
      for (int iter = 0; iter < opt.max_newton_per_stage; ++iter) {
        const BarrierEval ev = eval_barrier(st, true);
        if (!ev.feasible) throw SolverError("witness optimization left the interior");
        const double phi0 = t * dot64(rho_vec, vec_coords(st.w)) - ev.logdet_sum;

        // gradient blocks
        Vec64 gw;
        for (int i = 0; i < 64; ++i)
          gw[static_cast<std::size_t>(i)] = t * rho_vec[static_cast<std::size_t>(i)];
        for (std::size_t s = 0; s < 6; ++s) {
          const Vec64 xp = vec_coords(ev.inv_p[s]);
          const Vec64 yp = vec_coords(ev.inv_1mp[s]);
          Vec64 diff;
          for (int i = 0; i < 64; ++i) {
            const auto ii = static_cast<std::size_t>(i);
            gw[ii] += yp[ii] - xp[ii];
            diff[ii] = xp[ii] - yp[ii];
          }
          Vec64 gq = apply_perm(perms[s], diff);
          const Vec64 xq = vec_coords(ev.inv_q[s]);
          const Vec64 yq = vec_coords(ev.inv_1mq[s]);
          for (int i = 0; i < 64; ++i) {
            const auto ii = static_cast<std::size_t>(i);
            gq[ii] += yq[ii] - xq[ii];
          }
          ws->gq[s] = gq;
          ws->gq_tilde[s] = apply_perm(perms[s], gq);
        }

        // Schur complement on the W block.  Eliminating Q_s uses
        //   H_QsQs = P-hat (K_P + P-hat K_Q P-hat) P-hat,
        // so each bipartition costs one 64x64 Cholesky.
        ws->schur = Mat64{};
        Vec64 rhs;
        for (int i = 0; i < 64; ++i) rhs[static_cast<std::size_t>(i)] = -gw[static_cast<std::size_t>(i)];
        for (std::size_t s = 0; s < 6; ++s) {
          ws->kp[s] = barrier_hessian(ev.inv_p[s], ev.inv_1mp[s]);
          Mat64& a = ws->a_chol[s];
          a = ws->kp[s];
          const Mat64 kq = barrier_hessian(ev.inv_q[s], ev.inv_1mq[s]);
          conj_perm_add(perms[s], kq, a);
          chol64_with_ridge(a);

          ws->tmp = ws->kp[s];
          chol64_solve_mat(a, ws->tmp);           // A^-1 K_P
          matmul64(ws->kp[s], ws->tmp, ws->prod); // K_P A^-1 K_P
          for (int i = 0; i < 64; ++i)
            for (int j = 0; j < 64; ++j) ws->schur(i, j) += ws->kp[s](i, j) - ws->prod(i, j);

          Vec64 u = ws->gq_tilde[s];
          chol64_solve_vec(a, u);
          const Vec64 ku = matvec64(ws->kp[s], u);
          for (int i = 0; i < 64; ++i) rhs[static_cast<std::size_t>(i)] += ku[static_cast<std::size_t>(i)];
        }
        for (int i = 0; i < 64; ++i)
          for (int j = i + 1; j < 64; ++j) {
            const double v = 0.5 * (ws->schur(i, j) + ws->schur(j, i));
            ws->schur(i, j) = v;
            ws->schur(j, i) = v;
          }
        chol64_with_ridge(ws->schur);
        Vec64 dw = rhs;
        chol64_solve_vec(ws->schur, dw);

        std::array<Vec64, 6> dq;
        for (std::size_t s = 0; s < 6; ++s) {
          Vec64 u = matvec64(ws->kp[s], dw);
          for (int i = 0; i < 64; ++i) {
            const auto ii = static_cast<std::size_t>(i);
            u[ii] -= ws->gq_tilde[s][ii];
          }
          chol64_solve_vec(ws->a_chol[s], u);
          dq[s] = apply_perm(perms[s], u);
        }

        double decrement2 = -dot64(gw, dw);
        for (std::size_t s = 0; s < 6; ++s) decrement2 -= dot64(ws->gq[s], dq[s]);
        ++res.newton_steps;
        last_decrement2 = decrement2;
        if (decrement2 <= opt.decrement_tol) break;

        // backtracking line search with explicit interior check
        double alpha = 1.0;
        bool stepped = false;
        while (alpha > 1e-13) {
          BarrierState cand;
          cand.w = st.w + unvec_coords([&] {
            Vec64 v;
            for (int i = 0; i < 64; ++i) v[static_cast<std::size_t>(i)] = alpha * dw[static_cast<std::size_t>(i)];
            return v;
          }());
          for (std::size_t s = 0; s < 6; ++s) {
            Vec64 v;
            for (int i = 0; i < 64; ++i) v[static_cast<std::size_t>(i)] = alpha * dq[s][static_cast<std::size_t>(i)];
            cand.q[s] = st.q[s] + unvec_coords(v);
          }
          const BarrierEval cev = eval_barrier(cand, false);
          if (cev.feasible) {
            const double phi1 = t * dot64(rho_vec, vec_coords(cand.w)) - cev.logdet_sum;
            if (phi1 <= phi0 - 0.01 * alpha * decrement2) {
              st = cand;
              stepped = true;
              break;
            }
          }
          alpha *= 0.5;
        }
        if (!stepped) break;  // rounding floor, judge by the last decrement
      }
    } catch (const SolverError&) {
      // Nearly separable states push blocks to the cone boundary, where the
      // eliminated normal system can lose positive definiteness even with
      // the ridge.  The last accepted iterate is still strictly feasible and
      // its witness value is a valid lower bound, so report it as
      // unconverged instead of failing the whole evaluation.
      stage_failed = true;
    }
    if (stage_failed) {
      all_stages_centered = false;
      break;
    }
    // A Newton decrement lambda <= 0.05 bounds the gap by (nu + 0.73)/t,
    // well inside the factor-8 slack of the t schedule.  Dense states can
    // hit a floating-point floor above decrement_tol; that polish target is
    // best effort, centering is certified by the relaxed threshold.
    if (!(last_decrement2 <= std::max(opt.decrement_tol, 2.5e-3)))
      all_stages_centered = false;
    if (kBarrierNu / t <= opt.gap_tol) break;
    t *= opt.t_growth;
  }

  res.objective = -dot64(rho_vec, vec_coords(st.w));
  res.tau = std::max(res.objective, 0.0);
  res.converged = all_stages_centered;
  res.cert.w = st.w;
  for (std::size_t s = 0; s < 6; ++s) {
    res.cert.q[s] = st.q[s];
    res.cert.p[s] = st.w - partial_transpose(st.q[s], bipartition_masks[s]);
  }
  return res;
}

}  // namespace mcompton
