#include <cmath>

#include "doctest.h"
#include "dsm/errors.hpp"
#include "dsm/phi_fields.hpp"
#include "dsm/problem_zoo.hpp"
#include "dsm/regularized_path.hpp"
#include "fixtures.hpp"

using namespace dsm;
using fixture::scalar;
using fixture::scalar_problem;

namespace {

OperatorProblem cube_minus(double f, double u0) {
  return scalar_problem([](double u) { return u * u * u; }, [](double u) { return 3 * u * u; }, f, u0, 5.0);
}

OperatorProblem linear_scalar(double a, double f, double u0 = 0.0) {
  return scalar_problem([a](double u) { return a * u; }, [a](double) { return a; }, f, u0, 5.0);
}

// A = [[sqrt 2]] so that B = A^T A = [[2]] and q = A^T f = sqrt(2) f.
OperatorProblem normal_two(double q) {
  const double a = std::sqrt(2.0);
  auto p = make_linear_problem("b2", fixture::mat({{a}}), scalar(q / a), scalar(0), 5.0);
  return p;
}

}  // namespace

TEST_SUITE("phi_fields") {
  TEST_CASE("well-posed fields on scalar examples") {
    const auto cube = cube_minus(8, 1);
    CHECK(eval_phi(make_wellposed_phi(cube, Method::newton), 0, scalar(1))[0] == doctest::Approx(7.0 / 3.0));
    const auto two = linear_scalar(2, 0);
    CHECK(eval_phi(make_wellposed_phi(two, Method::gradient), 0, scalar(1))[0] == doctest::Approx(-4.0));
    CHECK(eval_phi(make_wellposed_phi(two, Method::gauss_newton), 0, scalar(1))[0] == doctest::Approx(-1.0));
    const auto one = linear_scalar(1, 0);
    CHECK(eval_phi(make_wellposed_phi(one, Method::descent), 0, scalar(2))[0] == doctest::Approx(-1.0));
    CHECK(eval_phi(make_wellposed_phi(one, Method::simple), 0, scalar(2))[0] == doctest::Approx(-2.0));
    CHECK(eval_phi(make_wellposed_phi(cube_minus(8, 2), Method::modified_newton), 0, scalar(3))[0] ==
          doctest::Approx(-19.0 / 12.0));
  }

  TEST_CASE("linear fields") {
    const auto s1 = EpsilonSchedule::constant(1.0);
    CHECK(eval_phi(make_linear_phi(normal_two(4), LinearVariant::plain, s1), 0, scalar(1))[0] ==
          doctest::Approx(1.0));
    CHECK(eval_phi(make_linear_phi(normal_two(2), LinearVariant::preconditioned, s1), 0, scalar(0))[0] ==
          doctest::Approx(2.0 / 3.0));
    const auto decaying = EpsilonSchedule::power(1, 1, 0.5);
    const PhiField pre = make_linear_phi(normal_two(2), LinearVariant::preconditioned, decaying);
    double prev_gap = 1.0;
    for (double t : {1e2, 1e4, 1e6, 1e8, 1e10}) {
      const double gap = std::abs(eval_phi(pre, t, scalar(0))[0] - 1.0);
      CHECK(gap < prev_gap);
      prev_gap = gap;
    }
    CHECK(prev_gap < 1e-5);
    CHECK_THROWS_AS(make_linear_phi(cube_minus(8, 1), LinearVariant::plain, s1), UsageError);
  }

  TEST_CASE("monotone fields") {
    const auto s1 = EpsilonSchedule::constant(1.0);
    CHECK(eval_phi(make_monotone_phi(linear_scalar(1, 0), MonotoneVariant::regularized_newton, s1), 0, scalar(3))[0] ==
          doctest::Approx(-3.0));
    CHECK(eval_phi(make_monotone_phi(cube_minus(0, 0), MonotoneVariant::simple, EpsilonSchedule::constant(0.5)), 0,
                   scalar(1))[0] == doctest::Approx(-1.5));
    CHECK(eval_phi(make_monotone_phi(cube_minus(0, 0), MonotoneVariant::regularized_newton, s1), 0, scalar(0))[0] ==
          0.0);
  }

  TEST_CASE("nonmonotone source field") {
    const auto s1 = EpsilonSchedule::constant(1.0);
    const auto sq = scalar_problem([](double u) { return u * u; }, [](double u) { return 2 * u; }, 0, 0, 5.0);
    CHECK(eval_phi(make_nonmonotone_phi(sq, s1), 0, scalar(1))[0] == doctest::Approx(-3.0 / 5.0));
    CHECK(eval_phi(make_nonmonotone_phi(linear_scalar(1, 0), s1), 0, scalar(1))[0] == doctest::Approx(-1.0));
    const auto at_root = scalar_problem([](double u) { return u * u; }, [](double u) { return 2 * u; }, 4, 2, 5.0);
    CHECK(eval_phi(make_nonmonotone_phi(at_root, s1, scalar(2)), 0, scalar(2))[0] == 0.0);
  }

  TEST_CASE("coupled field") {
    const auto one = linear_scalar(1, 0);
    const CoupledField c(one, Matrix::Zero(1, 1));
    CoupledState zero_q{scalar(1), Matrix::Zero(1, 1)};
    auto d = c(0, zero_q);
    CHECK(d.u[0] == 0.0);
    CHECK(d.Q(0, 0) == 1.0);
    CoupledState unit_q{scalar(1), Matrix::Identity(1, 1)};
    d = c(0, unit_q);
    CHECK(d.u[0] == -1.0);
    CHECK(d.Q(0, 0) == 0.0);

    const Matrix a = fixture::mat({{2, 1}, {0.5, 3}});
    const auto lin = make_linear_problem("a", a, fixture::vec({1, 2}), fixture::vec({0, 0}), 5.0);
    const Matrix inv = a.inverse();
    const Vector u = fixture::vec({0.3, -0.7});
    EvalCounters counters;
    const CoupledState dd = make_coupled_phi(lin, inv)(0, {u, inv}, &counters);
    CHECK((dd.u - eval_phi(make_wellposed_phi(lin, Method::newton), 0, u)).norm() <= 1e-14);
    CHECK(counters.solves == 0);
  }

  TEST_CASE("lambda_defect") {
    auto p = linear_scalar(2, 2);
    p.y_known = scalar(1);
    CHECK(lambda_defect(p, Matrix::Constant(1, 1, 0.5)) == doctest::Approx(0.0));
    CHECK(lambda_defect(p, Matrix::Zero(1, 1)) == doctest::Approx(1.0));
    CHECK(lambda_defect(p, Matrix::Constant(1, 1, 0.4)) == doctest::Approx(0.2));
    p.y_known.reset();
    CHECK_THROWS_AS(lambda_defect(p, Matrix::Zero(1, 1)), UsageError);
  }

  TEST_CASE("stationarity at exact solutions and purity") {
    const OperatorProblem p = make_zoo_problem("wellposed_smooth:5:3");
    const Vector& y = *p.y_known;
    for (Method m : {Method::newton, Method::simple, Method::gradient, Method::gauss_newton,
                     Method::modified_newton, Method::descent}) {
      CHECK(eval_phi(make_wellposed_phi(p, m), 0, y).norm() <= 1e-13);
    }
    const auto h = make_zoo_problem("hilbert:4");
    const PhiField plain = make_linear_phi(h, LinearVariant::plain, EpsilonSchedule::power(1, 1, 0.5));
    const Vector u = Vector::LinSpaced(4, -1, 1);
    const Vector a = eval_phi(plain, 2.5, u);
    const Vector b = eval_phi(plain, 2.5, u);
    CHECK((a - b).norm() == 0.0);
    const PhiField newton = make_wellposed_phi(cube_minus(8, 1), Method::newton);
    for (int i = 0; i < 3; ++i) CHECK(eval_phi(newton, 0, scalar(1))[0] == doctest::Approx(7.0 / 3.0));
  }

  TEST_CASE("descent identity (f', Phi) = -f on random states") {
    const OperatorProblem p = make_zoo_problem("wellposed_smooth:6:1");
    const PhiField phi = make_wellposed_phi(p, Method::descent);
    Rng rng(10);
    for (int i = 0; i < 50; ++i) {
      const Vector u = rng.in_ball(p.u0, 3.0);
      const Vector F = residual(p, u);
      const Vector fprime = 2.0 * p.jacobian(u).transpose() * F;
      const double f = F.squaredNorm();
      CHECK(std::abs(fprime.dot(eval_phi(phi, 0, u)) + f) <= 1e-10 * std::max(1.0, f));
    }
  }

  TEST_CASE("well-posed rate identities for newton and gradient") {
    const OperatorProblem p = make_zoo_problem("wellposed_smooth:6:2");
    const PhiField newton = make_wellposed_phi(p, Method::newton);
    const PhiField gradient = make_wellposed_phi(p, Method::gradient);
    Rng rng(11);
    for (int i = 0; i < 50; ++i) {
      const Vector u = rng.in_ball(p.u0, 3.0);
      const Vector F = residual(p, u);
      const Matrix A = p.jacobian(u);
      CHECK((A * eval_phi(newton, 0, u)).dot(F) == doctest::Approx(-F.squaredNorm()).epsilon(1e-12));
      const double g = (A * eval_phi(gradient, 0, u)).dot(F);
      CHECK(g == doctest::Approx(-(A.transpose() * F).squaredNorm()).epsilon(1e-12));
      CHECK(g <= -F.squaredNorm() / (*p.m1 * *p.m1) * (1.0 - 1e-12));
    }
  }

  TEST_CASE("regularized Newton field vanishes on the regularized solution") {
    const OperatorProblem p = make_zoo_problem("monotone_cubic:5:2");
    for (double eps : {1.0, 0.1, 0.01}) {
      const Vector ut = Vector::Constant(p.dim, 0.1);
      const Vector V = solve_V(p, eps, ut);
      const PhiField phi = make_monotone_phi(p, MonotoneVariant::regularized_newton, EpsilonSchedule::constant(eps), ut);
      CHECK(eval_phi(phi, 0, V).norm() <= 1e-9);
    }
  }

  TEST_CASE("noisy and exact fields agree bitwise at zero noise") {
    const OperatorProblem p = make_zoo_problem("monotone_cubic:4:1");
    const NoisyProblem n = add_noise(p, 0.0, 3);
    const auto s = EpsilonSchedule::power(2, 1, 0.5);
    Rng rng(12);
    for (Method m : {Method::monotone_reg_newton, Method::monotone_simple, Method::nonmonotone_source}) {
      const PhiField exact = make_phi(p, m, s);
      const PhiField noisy = make_phi(n, m, s);
      for (int i = 0; i < 5; ++i) {
        const Vector u = rng.in_ball(p.u0, 1.0);
        const double t = rng.uniform(0, 10);
        CHECK((exact(t, u) - noisy(t, u)).norm() == 0.0);
      }
    }
  }

  TEST_CASE("fields are locally Lipschitz on the ball") {
    const OperatorProblem p = make_zoo_problem("monotone_cubic:4:5");
    const auto s = EpsilonSchedule::power(2, 1, 0.5);
    Rng rng(13);
    for (Method m : {Method::monotone_reg_newton, Method::monotone_simple, Method::newton}) {
      const PhiField phi = m == Method::newton ? make_wellposed_phi(p, m) : make_phi(p, m, s);
      double worst = 0.0;
      for (int i = 0; i < 200; ++i) {
        const Vector u = rng.in_ball(p.u0, p.radius);
        const Vector du = 1e-6 * rng.unit_vector(p.dim);
        worst = std::max(worst, (phi(1.0, u + du) - phi(1.0, u)).norm() / du.norm());
      }
      CHECK(std::isfinite(worst));
      CHECK(worst < 1e4);
    }
  }

  TEST_CASE("singular solves and missing schedules") {
    const auto flat = scalar_problem([](double u) { return u * u; }, [](double u) { return 2 * u; }, 1, 0, 1.0);
    try {
      eval_phi(make_wellposed_phi(flat, Method::newton), 0.5, scalar(0));
      FAIL("expected SingularityError");
    } catch (const SingularityError& e) {
      CHECK(e.t() == 0.5);
      CHECK(e.u()[0] == 0.0);
    }
    CHECK_THROWS_AS(make_wellposed_phi(flat, Method::modified_newton), SingularityError);
    CHECK_THROWS_AS(make_phi(flat, Method::monotone_simple, std::nullopt), UsageError);
    CHECK_THROWS_AS(make_wellposed_phi(flat, Method::linear_plain), UsageError);
  }

  TEST_CASE("method tags round-trip") {
    for (const auto& tag : method_tags()) CHECK(method_tag(parse_method(tag)) == tag);
    CHECK(method_tags().size() == 12);
    CHECK_THROWS_AS(parse_method("regularized_newton"), UsageError);
  }
}
