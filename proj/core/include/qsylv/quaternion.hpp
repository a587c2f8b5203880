#pragma once

#include <array>
#include <cmath>

#include "qsylv/errors.hpp"

namespace qsylv {

/// Real quaternion w + x i + y j + z k with the Hamilton convention
/// i^2 = j^2 = k^2 = ijk = -1.
struct Quaternion {
  double w = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Quaternion() = default;
  constexpr Quaternion(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

  /// Embedding of a real scalar.
  static constexpr Quaternion real(double v) { return Quaternion(v, 0.0, 0.0, 0.0); }

  constexpr Quaternion& operator+=(const Quaternion& o) {
    w += o.w;
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }

  constexpr Quaternion& operator-=(const Quaternion& o) {
    w -= o.w;
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }

  constexpr Quaternion& operator*=(double s) {
    w *= s;
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }

  friend constexpr bool operator==(const Quaternion&, const Quaternion&) = default;
};

constexpr Quaternion operator+(Quaternion a, const Quaternion& b) {
  a += b;
  return a;
}

constexpr Quaternion operator-(Quaternion a, const Quaternion& b) {
  a -= b;
  return a;
}

constexpr Quaternion operator-(const Quaternion& a) { return Quaternion(-a.w, -a.x, -a.y, -a.z); }

constexpr Quaternion operator*(const Quaternion& a, const Quaternion& b) {
  return Quaternion(a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
                    a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
                    a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
                    a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w);
}

constexpr Quaternion operator*(double s, Quaternion q) {
  q *= s;
  return q;
}

constexpr Quaternion operator*(Quaternion q, double s) {
  q *= s;
  return q;
}

constexpr Quaternion conj(const Quaternion& q) { return Quaternion(q.w, -q.x, -q.y, -q.z); }

constexpr double norm_sq(const Quaternion& q) {
  return q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z;
}

inline double abs(const Quaternion& q) { return std::sqrt(norm_sq(q)); }

/// Involution of the quaternion algebra determined by a unit 3-vector n.
/// The scalar part is fixed and the component of the vector part along n is
/// negated, so the vector part is mapped by I - 2 n n^T. For n = (0,0,1) this
/// fixes 1, i, j and sends k to -k. The map is linear, an involution, and
/// reverses products like conjugation does.
class Involution {
 public:
  /// The axis defaults to (0, 0, 1): the map fixing 1, i, j and negating k.
  Involution() = default;

  /// Builds the involution from a not-necessarily-normalized axis.
  /// Throws InvalidAxis if the axis is zero or not finite.
  static Involution from_axis(double nx, double ny, double nz) {
    if (!std::isfinite(nx) || !std::isfinite(ny) || !std::isfinite(nz)) {
      throw InvalidAxis("involution axis must be finite");
    }
    const double len = std::sqrt(nx * nx + ny * ny + nz * nz);
    if (len == 0.0) {
      throw InvalidAxis("involution axis must be nonzero");
    }
    Involution out;
    out.n_ = {nx / len, ny / len, nz / len};
    return out;
  }

  static Involution from_axis(const std::array<double, 3>& n) {
    return from_axis(n[0], n[1], n[2]);
  }

  const std::array<double, 3>& axis() const { return n_; }

  Quaternion operator()(const Quaternion& q) const {
    const double d = 2.0 * (q.x * n_[0] + q.y * n_[1] + q.z * n_[2]);
    return Quaternion(q.w, q.x - d * n_[0], q.y - d * n_[1], q.z - d * n_[2]);
  }

 private:
  std::array<double, 3> n_{0.0, 0.0, 1.0};
};

}  // namespace qsylv
