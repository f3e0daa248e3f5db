#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dsm/operator_model.hpp"

namespace dsm {

/// Hilbert matrix H_n (entries 1/(i+j-1)), y = ones, f = H_n y, u0 = 0.
/// 2 <= n <= 12.
OperatorProblem make_hilbert_system(int n);

enum class FredholmKernel { exp_st, gaussian };

/// Trapezoid discretization on [0, 1] of (Au)(s) = int_0^1 k(s,t) u(t) dt
/// with nodes s_i = i/(n-1). f samples the exact image of u* = 1, and
/// y_known is the minimal-norm solution of the discrete system.
/// k = e^{st} or exp(-(s-t)^2 / (2 * 0.1^2)).
OperatorProblem make_fredholm(int n, FredholmKernel kernel);

/// F(u) = L u + u^3 - f with L random SPD (eigenvalues in [0.1, 2]) and y
/// drawn from the unit ball; u0 = 0, R = 3 r with r = ||y|| + ||u0||.
OperatorProblem make_monotone_cubic(int n, std::uint64_t seed);

/// Same construction with explicit L, y, u0.
OperatorProblem make_monotone_cubic_from(const Matrix& L, const Vector& y, const Vector& u0);

/// B(u) = D u + 0.1 u^2 (componentwise) with D diagonal in [0.5, 2]; the
/// ball of radius 0.5 around u0 = y + 0.1 e is sector-checked at
/// construction (phi0 = pi/4, r0 = 0.5), halving R on failure.
OperatorProblem make_nonmonotone_quadratic(int n, std::uint64_t seed);

/// F(u) = u + 0.3 sin(u) - f componentwise; F' in [0.7, 1.3], m1 = 1/0.7.
OperatorProblem make_wellposed_smooth(int n, std::uint64_t seed);

/// f_delta = f + delta e with e a seeded unit vector, so ||f_delta - f|| = delta.
NoisyProblem add_noise(const OperatorProblem& p, double delta, std::uint64_t seed);

/// Builds a zoo entry from its config name: hilbert:n, fredholm:n:kernel,
/// monotone_cubic:n:seed, nonmonotone_quad:n:seed, wellposed_smooth:n:seed.
/// The seed defaults to 0. Throws UsageError for unknown or malformed names.
OperatorProblem make_zoo_problem(std::string_view name);

/// Name patterns in a fixed order.
std::vector<std::string> zoo_names();

}  // namespace dsm
