#include "dsm/problem_zoo.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

#include "dsm/errors.hpp"
#include "dsm/rng.hpp"

namespace dsm {

namespace {

enum Stream : std::uint64_t { kOperator = 1, kSolution = 2, kStart = 3, kNoise = 4 };

constexpr double kGaussianWidth = 0.1;

double condition_number(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& s = svd.singularValues();
  return s(0) / s(s.size() - 1);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw UsageError(what);
}

}  // namespace

OperatorProblem make_hilbert_system(int n) {
  require(n >= 2 && n <= 12, "hilbert: n must lie in [2, 12]");
  Matrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = 1.0 / static_cast<double>(i + j + 1);
  }
  const Vector y = Vector::Ones(n);
  const Vector f = a * y;
  OperatorProblem p = make_linear_problem("hilbert:" + std::to_string(n), a, f, Vector::Zero(n),
                                          3.0 * y.norm());
  p.y_known = y;
  p.monotone = true;
  p.notes["condition_number"] = condition_number(a);
  return p;
}

OperatorProblem make_fredholm(int n, FredholmKernel kernel) {
  require(n >= 4, "fredholm: n must be >= 4");
  const double h = 1.0 / static_cast<double>(n - 1);
  Vector nodes(n);
  Vector weights = Vector::Constant(n, h);
  for (int i = 0; i < n; ++i) nodes[i] = static_cast<double>(i) * h;
  weights[0] = weights[n - 1] = 0.5 * h;

  auto k = [kernel](double s, double t) {
    if (kernel == FredholmKernel::exp_st) return std::exp(s * t);
    const double d = s - t;
    return std::exp(-d * d / (2.0 * kGaussianWidth * kGaussianWidth));
  };
  // image of u* = 1 under the continuous operator
  auto exact_image = [kernel](double s) {
    if (kernel == FredholmKernel::exp_st) return s == 0.0 ? 1.0 : std::expm1(s) / s;
    const double c = kGaussianWidth * std::numbers::sqrt2;
    return kGaussianWidth * std::sqrt(std::numbers::pi / 2.0) *
           (std::erf((1.0 - s) / c) + std::erf(s / c));
  };

  Matrix a(n, n);
  Vector f(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = k(nodes[i], nodes[j]) * weights[j];
    f[i] = exact_image(nodes[i]);
  }
  const std::string tag = kernel == FredholmKernel::exp_st ? "exp_st" : "gaussian";
  const Vector y = minimal_norm_solution(a, f);
  OperatorProblem p = make_linear_problem("fredholm:" + std::to_string(n) + ":" + tag, a, f,
                                          Vector::Zero(n), 3.0 * y.norm());
  p.y_known = y;
  p.notes["condition_number"] = condition_number(a);
  p.notes["y_norm"] = y.norm();
  p.notes["y_minus_ustar_norm"] = (y - Vector::Ones(n)).norm();
  return p;
}

OperatorProblem make_monotone_cubic_from(const Matrix& L, const Vector& y, const Vector& u0) {
  const auto n = L.rows();
  require(L.cols() == n && y.size() == n && u0.size() == n, "monotone_cubic: dimension mismatch");
  OperatorProblem p;
  p.name = "monotone_cubic";
  p.dim = static_cast<int>(n);
  p.apply = [L](const Vector& u) -> Vector { return L * u + u.array().cube().matrix(); };
  p.jacobian = [L](const Vector& u) -> Matrix {
    Matrix j = L;
    j.diagonal().array() += 3.0 * u.array().square();
    return j;
  };
  p.rhs = p.apply(y);
  p.u0 = u0;
  const double r = y.norm() + u0.norm();
  p.radius = 3.0 * (r > 0.0 ? r : 1.0);
  const double reach = u0.norm() + p.radius;  // bound on ||u|| over the ball
  p.M2 = 6.0 * reach;
  p.M1 = spectral_norm(L) + 3.0 * reach * reach;
  p.y_known = y;
  p.monotone = true;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (L + L.transpose()));
  p.notes["min_sym_derivative"] = es.eigenvalues()(0);
  p.notes["r"] = r;
  p.validate();
  return p;
}

OperatorProblem make_monotone_cubic(int n, std::uint64_t seed) {
  require(n >= 1, "monotone_cubic: n must be >= 1");
  const Rng root(seed);
  Rng op = root.split(kOperator);
  Matrix g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g(i, j) = op.normal();
  }
  const Matrix q = Eigen::HouseholderQR<Matrix>(g).householderQ();
  Vector lambda(n);
  for (int i = 0; i < n; ++i) lambda[i] = op.uniform(0.1, 2.0);
  Matrix L = q * lambda.asDiagonal() * q.transpose();
  L = 0.5 * (L + L.transpose());
  Rng sol = root.split(kSolution);
  const Vector y = sol.in_ball(Vector::Zero(n), 1.0);
  OperatorProblem p = make_monotone_cubic_from(L, y, Vector::Zero(n));
  p.name = "monotone_cubic:" + std::to_string(n) + ":" + std::to_string(seed);
  return p;
}

OperatorProblem make_nonmonotone_quadratic(int n, std::uint64_t seed) {
  require(n >= 1, "nonmonotone_quad: n must be >= 1");
  const Rng root(seed);
  Rng op = root.split(kOperator);
  Vector d(n);
  for (int i = 0; i < n; ++i) d[i] = op.uniform(0.5, 2.0);
  Rng sol = root.split(kSolution);
  const Vector y = sol.in_ball(Vector::Zero(n), 1.0);
  Rng start = root.split(kStart);
  const Vector u0 = y + 0.1 * start.unit_vector(n);

  OperatorProblem p;
  p.name = "nonmonotone_quad:" + std::to_string(n) + ":" + std::to_string(seed);
  p.dim = n;
  p.apply = [d](const Vector& u) -> Vector {
    return (d.array() * u.array() + 0.1 * u.array().square()).matrix();
  };
  p.jacobian = [d](const Vector& u) -> Matrix {
    return (d.array() + 0.2 * u.array()).matrix().asDiagonal();
  };
  p.rhs = p.apply(y);
  p.u0 = u0;
  p.M2 = 0.2;
  p.y_known = y;
  p.monotone = false;

  const SectorSpec sector{std::numbers::pi / 4.0, 0.5};
  double radius = 0.5;
  bool sector_ok = false;
  for (int attempt = 0; attempt < 6 && !sector_ok; ++attempt) {
    p.radius = radius;
    p.M1 = d.maxCoeff() + 0.2 * (u0.cwiseAbs().maxCoeff() + radius);
    Rng probe = root.split(100 + static_cast<std::uint64_t>(attempt));
    sector_ok = sector_probe(p, sector, 200, probe).ok;
    if (!sector_ok) radius *= 0.5;
  }
  if (!sector_ok) throw NumericError("nonmonotone_quad: sector condition fails on every tried ball");

  const Matrix jy = p.jacobian(y);
  const Matrix t_tilde = jy.transpose() * jy;
  const Vector z = t_tilde.ldlt().solve(y);
  p.notes["phi0"] = sector.phi0;
  p.notes["r0"] = sector.r0;
  p.notes["source_norm"] = z.norm();
  p.notes["source_small"] = 2.0 * p.M1 * p.M2 * z.norm() <= 0.5 ? 1.0 : 0.0;
  p.validate();
  return p;
}

OperatorProblem make_wellposed_smooth(int n, std::uint64_t seed) {
  require(n >= 1, "wellposed_smooth: n must be >= 1");
  const Rng root(seed);
  Rng sol = root.split(kSolution);
  const Vector y = sol.in_ball(Vector::Zero(n), 1.0);

  OperatorProblem p;
  p.name = "wellposed_smooth:" + std::to_string(n) + ":" + std::to_string(seed);
  p.dim = n;
  p.apply = [](const Vector& u) -> Vector { return (u.array() + 0.3 * u.array().sin()).matrix(); };
  p.jacobian = [](const Vector& u) -> Matrix {
    return (1.0 + 0.3 * u.array().cos()).matrix().asDiagonal();
  };
  p.rhs = p.apply(y);
  p.u0 = Vector::Zero(n);
  p.M1 = 1.3;
  p.M2 = 0.3;
  p.m1 = 1.0 / 0.7;
  // large enough for every well-posed flow's reachability condition
  const double f0 = residual(p, p.u0).norm();
  p.radius = f0 > 0.0 ? 2.0 * p.M1 * *p.m1 * *p.m1 * f0 : 1.0;
  p.y_known = y;
  p.monotone = true;
  p.notes["min_sym_derivative"] = 0.7;
  p.validate();
  return p;
}

NoisyProblem add_noise(const OperatorProblem& p, double delta, std::uint64_t seed) {
  require(delta >= 0.0, "add_noise: delta must be >= 0");
  NoisyProblem out;
  out.base = p;
  out.delta = delta;
  Rng rng = Rng(seed).split(kNoise);
  out.f_delta = p.rhs + delta * rng.unit_vector(p.dim);
  out.validate();
  return out;
}

namespace {

std::vector<std::string_view> split_colon(std::string_view s) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = s.find(':', pos);
    parts.push_back(s.substr(pos, next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return parts;
}

template <class Int>
Int parse_int(std::string_view text, std::string_view name) {
  Int value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw UsageError("problem '" + std::string(name) + "': cannot parse '" + std::string(text) +
                     "' as an integer");
  }
  return value;
}

}  // namespace

OperatorProblem make_zoo_problem(std::string_view name) {
  const auto parts = split_colon(name);
  const std::string_view kind = parts[0];
  auto arity = [&](std::size_t lo, std::size_t hi) {
    if (parts.size() < lo || parts.size() > hi) {
      throw UsageError("problem '" + std::string(name) + "': wrong number of ':' fields");
    }
  };
  auto seed_at = [&](std::size_t i) -> std::uint64_t {
    return parts.size() > i ? parse_int<std::uint64_t>(parts[i], name) : 0;
  };
  if (kind == "hilbert") {
    arity(2, 2);
    return make_hilbert_system(parse_int<int>(parts[1], name));
  }
  if (kind == "fredholm") {
    arity(2, 3);
    FredholmKernel k = FredholmKernel::exp_st;
    if (parts.size() == 3) {
      if (parts[2] == "exp_st") {
        k = FredholmKernel::exp_st;
      } else if (parts[2] == "gaussian") {
        k = FredholmKernel::gaussian;
      } else {
        throw UsageError("problem '" + std::string(name) + "': unknown kernel '" +
                         std::string(parts[2]) + "'");
      }
    }
    return make_fredholm(parse_int<int>(parts[1], name), k);
  }
  if (kind == "monotone_cubic") {
    arity(2, 3);
    return make_monotone_cubic(parse_int<int>(parts[1], name), seed_at(2));
  }
  if (kind == "nonmonotone_quad") {
    arity(2, 3);
    return make_nonmonotone_quadratic(parse_int<int>(parts[1], name), seed_at(2));
  }
  if (kind == "wellposed_smooth") {
    arity(2, 3);
    return make_wellposed_smooth(parse_int<int>(parts[1], name), seed_at(2));
  }
  throw UsageError("unknown problem '" + std::string(name) + "'");
}

std::vector<std::string> zoo_names() {
  return {"hilbert:n", "fredholm:n:kernel", "monotone_cubic:n:seed", "nonmonotone_quad:n:seed",
          "wellposed_smooth:n:seed"};
}

}  // namespace dsm
