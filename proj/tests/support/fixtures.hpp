#pragma once

#include <functional>
#include <optional>
#include <string>

#include "dsm/operator_model.hpp"

namespace fixture {

using dsm::Matrix;
using dsm::Vector;

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

inline Vector scalar(double x) { return vec({x}); }

/// One-dimensional problem B(u) = b(u), F = B - f.
inline dsm::OperatorProblem scalar_problem(std::function<double(double)> b, std::function<double(double)> db,
                                           double f, double u0, double radius = 1.0) {
  dsm::OperatorProblem p;
  p.name = "scalar";
  p.dim = 1;
  p.apply = [b](const Vector& u) { return scalar(b(u[0])); };
  p.jacobian = [db](const Vector& u) {
    Matrix m(1, 1);
    m(0, 0) = db(u[0]);
    return m;
  };
  p.rhs = scalar(f);
  p.u0 = scalar(u0);
  p.radius = radius;
  p.validate();
  return p;
}

/// B(u) = u^3 componentwise.
inline dsm::OperatorProblem cube_problem(Vector f, Vector u0, double radius = 1.0) {
  dsm::OperatorProblem p;
  p.name = "cube";
  p.dim = static_cast<int>(f.size());
  p.apply = [](const Vector& u) -> Vector { return u.array().cube().matrix(); };
  p.jacobian = [](const Vector& u) -> Matrix { return (3.0 * u.array().square()).matrix().asDiagonal(); };
  p.rhs = std::move(f);
  p.u0 = std::move(u0);
  p.radius = radius;
  p.monotone = true;
  p.validate();
  return p;
}

inline Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = static_cast<Eigen::Index>(rows.begin()->size());
  Matrix m(r, c);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double x : row) m(i, j++) = x;
    ++i;
  }
  return m;
}

}  // namespace fixture
