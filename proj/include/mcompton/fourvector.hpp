#ifndef MCOMPTON_FOURVECTOR_HPP
#define MCOMPTON_FOURVECTOR_HPP

#include <array>
#include <cmath>
#include <complex>

namespace mcompton {

/**
 * Real Minkowski four-vector with metric (+,-,-,-).
 *
 * Component order is (t, x, y, z).  Used for all particle momenta; the
 * complex variant below exists only for polarization vectors, which pick up
 * complex components under gauge shifts.
 */
struct FourVector {
  double t = 0.0, x = 0.0, y = 0.0, z = 0.0;

  FourVector() = default;
  FourVector(double t_, double x_, double y_, double z_) : t(t_), x(x_), y(y_), z(z_) {}

  double operator[](int mu) const {
    switch (mu) {
      case 0: return t;
      case 1: return x;
      case 2: return y;
      default: return z;
    }
  }

  FourVector operator+(const FourVector& o) const { return {t + o.t, x + o.x, y + o.y, z + o.z}; }
  FourVector operator-(const FourVector& o) const { return {t - o.t, x - o.x, y - o.y, z - o.z}; }
  FourVector operator-() const { return {-t, -x, -y, -z}; }
  FourVector operator*(double s) const { return {t * s, x * s, y * s, z * s}; }

  FourVector& operator+=(const FourVector& o) {
    t += o.t; x += o.x; y += o.y; z += o.z;
    return *this;
  }
  FourVector& operator-=(const FourVector& o) {
    t -= o.t; x -= o.x; y -= o.y; z -= o.z;
    return *this;
  }

  // |spatial part|
  double spatial_norm() const { return std::sqrt(x * x + y * y + z * z); }
};

inline FourVector operator*(double s, const FourVector& v) { return v * s; }

// a.b with metric (+,-,-,-)
inline double minkowski_dot(const FourVector& a, const FourVector& b) {
  return a.t * b.t - a.x * b.x - a.y * b.y - a.z * b.z;
}

inline double minkowski_norm2(const FourVector& a) { return minkowski_dot(a, a); }

/** Complex-component four-vector; same metric conventions as FourVector. */
struct ComplexFourVector {
  std::complex<double> t{0.0, 0.0}, x{0.0, 0.0}, y{0.0, 0.0}, z{0.0, 0.0};

  ComplexFourVector() = default;
  ComplexFourVector(std::complex<double> t_, std::complex<double> x_,
                    std::complex<double> y_, std::complex<double> z_)
      : t(t_), x(x_), y(y_), z(z_) {}
  // NOLINTNEXTLINE(google-explicit-constructor): real vectors embed naturally
  ComplexFourVector(const FourVector& v) : t(v.t), x(v.x), y(v.y), z(v.z) {}

  ComplexFourVector operator+(const ComplexFourVector& o) const {
    return {t + o.t, x + o.x, y + o.y, z + o.z};
  }
  ComplexFourVector operator*(std::complex<double> s) const {
    return {t * s, x * s, y * s, z * s};
  }
};

inline std::complex<double> minkowski_dot(const ComplexFourVector& a, const ComplexFourVector& b) {
  return a.t * b.t - a.x * b.x - a.y * b.y - a.z * b.z;
}

}  // namespace mcompton

#endif
