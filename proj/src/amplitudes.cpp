#include "mcompton/amplitudes.hpp"

#include <algorithm>
#include <cmath>

#include "mcompton/constants.hpp"
#include "mcompton/errors.hpp"

namespace mcompton {

namespace {

constexpr double kMass = constants::electron_mass_mev;
constexpr double kMass2 = kMass * kMass;

// relative size below which q^2 - m^2 counts as a vanishing denominator
constexpr double kPropagatorTol = 1e-14;

template <std::size_t N>
std::vector<std::array<int, N>> make_orderings() {
  std::array<int, N> base;
  for (std::size_t i = 0; i < N; ++i) base[i] = static_cast<int>(i);
  std::vector<std::array<int, N>> out;
  do {
    out.push_back(base);
  } while (std::next_permutation(base.begin(), base.end()));
  return out;
}

double propagator_denominator(const FourVector& q) {
  const double d = minkowski_norm2(q) - kMass2;
  if (std::abs(d) < kPropagatorTol * kMass2)
    throw KinematicsError("fermion propagator denominator vanishes");
  return d;
}

DiracMatrix propagator_matrix(const FourVector& q) {
  const double den = propagator_denominator(q);
  DiracMatrix p = feynman_slash(q);
  for (int i = 0; i < 4; ++i) p(i, i) += kMass;
  return p * cplx{1.0 / den, 0.0};
}

// generic single-channel chain over all orderings
template <std::size_t N>
cplx n_chain(const FourVector& p_i, int r_i, const FourVector& p_f, int r_f,
             const std::array<FourVector, N>& k, const std::array<ComplexFourVector, N>& eps) {
  static_assert(N >= 2 && N <= 4);
  const Bispinor u = bispinor(p_i, r_i);
  const AdjointBispinor ubar = dirac_adjoint(bispinor(p_f, r_f));
  std::array<DiracMatrix, N> eslash;
  for (std::size_t j = 0; j < N; ++j) eslash[j] = feynman_slash(eps[j]);

  std::array<int, N> ordering;
  for (std::size_t i = 0; i < N; ++i) ordering[i] = static_cast<int>(i);
  cplx total{0.0, 0.0};
  do {
    Bispinor v = matvec(eslash[static_cast<std::size_t>(ordering[0])], u);
    for (int t = 1; t < static_cast<int>(N); ++t) {
      const FourVector q = propagator_momentum(p_i, k, ordering, t);
      v = matvec(propagator_matrix(q), v);
      v = matvec(eslash[static_cast<std::size_t>(ordering[static_cast<std::size_t>(t)])], v);
    }
    total += contract(ubar, v);
  } while (std::next_permutation(ordering.begin(), ordering.end()));

  double mpow = 1.0;
  for (std::size_t i = 1; i < N; ++i) mpow *= kMass;
  return total * mpow;
}

/**
 * Shared-work evaluation of all 4 * 2^N spin/polarization channels.
 *
 * Propagator matrices depend only on the *set* of photons attached so far,
 * so they are cached per subset mask.  Within one ordering the spinor chain
 * is evaluated once as a branching tree over the per-photon polarization
 * choice: the state count doubles at each vertex, which costs
 * 2+4+...+2^N matrix-vector products instead of 2^N full chains.
 */
template <std::size_t N>
void channel_core(const FourVector& p_i, const FourVector& p_f,
                  const std::array<FourVector, N>& k,
                  const std::array<std::array<FourVector, 2>, N>& pol, cplx* out) {
  const int nstates = 1 << N;
  // polarization slash matrices
  std::array<std::array<DiracMatrix, 2>, N> eslash;
  for (std::size_t j = 0; j < N; ++j)
    for (int b = 0; b < 2; ++b) eslash[j][b] = feynman_slash(ComplexFourVector(pol[j][b]));

  // propagator matrices per photon subset (sizes 1..N-1)
  std::array<DiracMatrix, 1 << N> prop;
  for (int mask = 1; mask < nstates - 1; ++mask) {
    if (mask == 0) continue;
    FourVector q = p_i;
    for (std::size_t j = 0; j < N; ++j) {
      if (!(mask & (1 << j))) continue;
      if (j == 0)
        q += k[0];
      else
        q -= k[j];
    }
    prop[static_cast<std::size_t>(mask)] = propagator_matrix(q);
  }

  const std::array<Bispinor, 2> u{bispinor(p_i, 1), bispinor(p_i, 2)};
  const std::array<AdjointBispinor, 2> ubar{dirac_adjoint(bispinor(p_f, 1)),
                                            dirac_adjoint(bispinor(p_f, 2))};
  double mpow = 1.0;
  for (std::size_t i = 1; i < N; ++i) mpow *= kMass;

  std::array<int, N> ordering;
  for (std::size_t i = 0; i < N; ++i) ordering[i] = static_cast<int>(i);

  std::array<Bispinor, 1 << N> cur, nxt;
  do {
    for (int ri = 0; ri < 2; ++ri) {
      cur[0] = u[static_cast<std::size_t>(ri)];
      int count = 1;
      int mask = 0;
      for (int t = 0; t < static_cast<int>(N); ++t) {
        const int j = ordering[static_cast<std::size_t>(t)];
        if (t > 0) {
          const DiracMatrix& pm = prop[static_cast<std::size_t>(mask)];
          for (int s = 0; s < count; ++s) cur[static_cast<std::size_t>(s)] =
              matvec(pm, cur[static_cast<std::size_t>(s)]);
        }
        for (int b = 0; b < 2; ++b)
          for (int s = 0; s < count; ++s)
            nxt[static_cast<std::size_t>((b << t) | s)] =
                matvec(eslash[static_cast<std::size_t>(j)][b], cur[static_cast<std::size_t>(s)]);
        count *= 2;
        std::swap(cur, nxt);
        mask |= 1 << j;
      }
      // scatter: bit t of the state index is the polarization choice of
      // photon ordering[t]; table wants photon 0 most significant
      std::array<int, N> pos_of{};
      for (int t = 0; t < static_cast<int>(N); ++t)
        pos_of[static_cast<std::size_t>(ordering[static_cast<std::size_t>(t)])] = t;
      for (int s = 0; s < count; ++s) {
        int polbits = 0;
        for (std::size_t j = 0; j < N; ++j)
          polbits |= ((s >> pos_of[j]) & 1) << (N - 1 - j);
        for (int rf = 0; rf < 2; ++rf) {
          const cplx amp =
              contract(ubar[static_cast<std::size_t>(rf)], cur[static_cast<std::size_t>(s)]);
          out[static_cast<std::size_t>(((ri * 2 + rf) << N) | polbits)] += amp * mpow;
        }
      }
    }
  } while (std::next_permutation(ordering.begin(), ordering.end()));
}

template <std::size_t N>
std::array<std::array<FourVector, 2>, N> basis_for(const std::array<Direction, N>& dirs) {
  std::array<std::array<FourVector, 2>, N> pol;
  for (std::size_t j = 0; j < N; ++j) {
    auto [e1, e2] = polarization_basis(dirs[j]);
    pol[j] = {e1, e2};
  }
  return pol;
}

}  // namespace

const std::vector<std::array<int, 2>>& sc_orderings() {
  static const auto v = make_orderings<2>();
  return v;
}
const std::vector<std::array<int, 3>>& dc_orderings() {
  static const auto v = make_orderings<3>();
  return v;
}
const std::vector<std::array<int, 4>>& tc_orderings() {
  static const auto v = make_orderings<4>();
  return v;
}

cplx n_sc(const FourVector& p_i, int r_i, const FourVector& p_f, int r_f,
          const std::array<FourVector, 2>& k, const std::array<ComplexFourVector, 2>& eps) {
  return n_chain<2>(p_i, r_i, p_f, r_f, k, eps);
}

cplx n_dc(const FourVector& p_i, int r_i, const FourVector& p_f, int r_f,
          const std::array<FourVector, 3>& k, const std::array<ComplexFourVector, 3>& eps) {
  return n_chain<3>(p_i, r_i, p_f, r_f, k, eps);
}

cplx n_tc(const FourVector& p_i, int r_i, const FourVector& p_f, int r_f,
          const std::array<FourVector, 4>& k, const std::array<ComplexFourVector, 4>& eps) {
  return n_chain<4>(p_i, r_i, p_f, r_f, k, eps);
}

ScChannelTable sc_channel_table(const ScKinematicPoint& pt) {
  ScChannelTable table;
  const std::array<FourVector, 2> k{pt.k0, pt.k1};
  const std::array<Direction, 2> dirs{Direction{0.0, 0.0}, pt.dir1};
  channel_core<2>(pt.p_i, pt.p_f, k, basis_for<2>(dirs), table.n.data());
  return table;
}

DcChannelTable dc_channel_table(const DcKinematicPoint& pt) {
  DcChannelTable table;
  const std::array<FourVector, 3> k{pt.k0, pt.k1, pt.k2};
  const std::array<Direction, 3> dirs{Direction{0.0, 0.0}, pt.dir1, pt.dir2};
  channel_core<3>(pt.p_i, pt.p_f, k, basis_for<3>(dirs), table.n.data());
  return table;
}

TcChannelTable tc_channel_table(const TcKinematicPoint& pt) {
  TcChannelTable table;
  const std::array<FourVector, 4> k{pt.k0, pt.k1, pt.k2, pt.k3};
  const std::array<Direction, 4> dirs{Direction{0.0, 0.0}, pt.dir1, pt.dir2, pt.dir3};
  channel_core<4>(pt.p_i, pt.p_f, k, basis_for<4>(dirs), table.n.data());
  return table;
}

}  // namespace mcompton
