#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace dmilp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Row sense of a linear constraint.
enum class Sense : std::uint8_t { LE, EQ, GE };

inline char sense_char(Sense s) {
  switch (s) {
    case Sense::LE: return '<';
    case Sense::EQ: return '=';
    case Sense::GE: return '>';
  }
  return '?';
}

/// A single linear constraint  coeffs . x  (sense)  rhs.
struct LinearConstraint {
  Vec coeffs;
  Sense sense = Sense::LE;
  double rhs = 0.0;

  bool satisfied(const Vec& x, double tol = 1e-9) const {
    double lhs = coeffs.dot(x);
    switch (sense) {
      case Sense::LE: return lhs <= rhs + tol;
      case Sense::EQ: return std::abs(lhs - rhs) <= tol;
      case Sense::GE: return lhs >= rhs - tol;
    }
    return false;
  }
};

/// 0/1 vector. Kept as bytes so pools and wire payloads stay compact.
using BinaryVec = std::vector<std::uint8_t>;

inline Vec binary_to_vec(const BinaryVec& u) {
  Vec v(static_cast<Eigen::Index>(u.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = u[static_cast<size_t>(i)];
  return v;
}

inline BinaryVec vec_to_binary(const Vec& v, double tol = 1e-6) {
  BinaryVec u(static_cast<size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i)
    u[static_cast<size_t>(i)] = v[i] > 0.5 ? 1 : 0;
  (void)tol;
  return u;
}

inline std::string binary_to_string(const BinaryVec& u) {
  std::string s;
  s.reserve(u.size());
  for (auto b : u) s.push_back(b ? '1' : '0');
  return s;
}

inline bool all_finite(const Vec& v) { return v.allFinite(); }
inline bool all_finite(const Mat& m) { return m.allFinite(); }

}  // namespace dmilp
