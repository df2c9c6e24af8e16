#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "choquard/errors.hpp"
#include "choquard/quadrature.hpp"

using namespace choquard;

TEST(GaussLegendre, ExactForPolynomials) {
  for (int n : {1, 2, 5, 16, 64}) {
    const auto& g = gauss_legendre(n);
    ASSERT_EQ(g.nodes.size(), static_cast<std::size_t>(n));
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += g.weights[i] * std::pow(g.nodes[i], k);
      const double exact = k % 2 == 1 ? 0.0 : 2.0 / (k + 1);
      EXPECT_NEAR(s, exact, 1e-14) << "n=" << n << " k=" << k;
    }
  }
  EXPECT_THROW(gauss_legendre(0), InputError);
}

TEST(QuadratureSpec, Validation) {
  QuadratureSpec q;
  EXPECT_NO_THROW(q.validate());
  q.nodes = 4;
  EXPECT_THROW(q.validate(), ParameterError);
  q = {};
  q.t_tail = 0.5;
  EXPECT_THROW(q.validate(), ParameterError);
  q = {};
  q.eps = 0.0;
  EXPECT_THROW(q.validate(), ParameterError);
}

TEST(QuadratureSpec, HashTracksContent) {
  const QuadratureSpec q;
  EXPECT_EQ(q.hash(), QuadratureSpec{}.hash());
  EXPECT_EQ(q.refined().nodes, 2 * q.nodes);
  EXPECT_NE(q.refined().hash(), q.hash());
  QuadratureSpec r = q;
  r.t_split = 2.0;
  EXPECT_NE(r.hash(), q.hash());
}

TEST(SubordinationRule, BetaIntegrals) {
  // int_0^inf t^(a-1) / (1 + t)^(a+b) dt = B(a, b), algebraic at both ends
  const QuadratureSpec q;
  for (auto [a, b] : {std::pair{0.5, 0.5}, {0.3, 1.2}, {0.9, 0.1}, {0.5, 1.0}}) {
    const auto rule = subordination_rule(a, b, q, effective_tail_start(q, 16, 2));
    double s = 0.0;
    for (const auto& n : rule) s += n.weight * std::pow(n.t, a - 1.0) * std::pow(1.0 + n.t, -a - b);
    const double exact = std::tgamma(a) * std::tgamma(b) / std::tgamma(a + b);
    EXPECT_NEAR(s / exact, 1.0, 1e-10) << a << ' ' << b;
  }
}

TEST(SubordinationRule, GammaIntegral) {
  const QuadratureSpec q;
  // The head map t = s^(1/a) leaves an analytic integrand only when 1/a is an
  // integer; otherwise a weak s^(1/a) kink costs a few digits.
  for (auto [a, tol] : {std::pair{0.25, 1e-12}, {0.5, 1e-12}, {1.0, 1e-12}, {0.75, 1e-8}, {0.3, 1e-8}}) {
    const auto rule = subordination_rule(a, 1.0, q, effective_tail_start(q, 16, 2));
    double s = 0.0;
    for (const auto& n : rule) s += n.weight * std::pow(n.t, a - 1.0) * std::exp(-n.t);
    EXPECT_NEAR(s / std::tgamma(a), 1.0, tol) << a;
  }
}

TEST(SubordinationRule, RejectsBadExponents) {
  const QuadratureSpec q;
  EXPECT_THROW(subordination_rule(0.0, 1.0, q, 16.0), ParameterError);
  EXPECT_THROW(subordination_rule(0.5, 0.5, q, 0.5), ParameterError);
}
