#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "qmotzkin/ascpoly.hpp"
#include "qmotzkin/errors.hpp"
#include "qmotzkin/qspecial.hpp"

using namespace qmotzkin;
using namespace qmotzkin::ascpoly;
using qmotzkin::qspecial::q_number;
using qmotzkin::qspecial::qpoch_finite;
using qmotzkin::qspecial::qpoch_infinite;

namespace {

constexpr double kPi = std::numbers::pi;

AscParams conj_params(double r, double alpha, double q) {
  const Complex a = -r * std::polar(1.0, alpha);
  return AscParams(a, std::conj(a), QBase(q));
}

QModelParams model(double q, double sigma, double rho0 = 0.0, double rho1 = 0.0) {
  QModelParams m;
  m.q = q;
  m.sigma = sigma;
  m.rho0 = rho0;
  m.rho1 = rho1;
  return m;
}

using LComplex = std::complex<long double>;

LComplex lpoch(LComplex a, long double q, std::size_t n) {
  LComplex p = 1.0L;
  for (std::size_t k = 0; k < n; ++k) {
    p *= 1.0L - a;
    a *= q;
  }
  return p;
}

// Q_n through the explicit sum over (b e^{i t};q)_k (a e^{-i t};q)_{n-k},
// in extended precision since the terms cancel.
double explicit_sum(std::size_t n, double theta, const AscParams& p) {
  const long double q = p.q.value();
  const LComplex e = std::polar(1.0L, static_cast<long double>(theta));
  const LComplex a(p.a.real(), p.a.imag());
  const LComplex b(p.b.real(), p.b.imag());
  LComplex sum = 0.0L;
  for (std::size_t k = 0; k <= n; ++k) {
    sum += lpoch(b * e, q, k) / lpoch(q, q, k) * std::pow(e, -static_cast<long double>(k)) *
           lpoch(a / e, q, n - k) / lpoch(q, q, n - k) *
           std::pow(e, static_cast<long double>(n - k));
  }
  return static_cast<double>((sum * lpoch(q, q, n)).real());
}

}  // namespace

TEST(AscParamsTest, Validation) {
  EXPECT_THROW(AscParams(Complex(0.1, 0.2), Complex(0.1, 0.3), QBase(0.5)), DomainError);
  EXPECT_THROW(AscParams(2.0, 0.6, QBase(0.5)), DomainError);
  EXPECT_NO_THROW(AscParams(0.3, -0.9, QBase(0.5)));
  EXPECT_NO_THROW(conj_params(0.5, 1.0, 0.3));
}

TEST(QModel, DerivedParametersSolveSystem) {
  for (double q : {0.0, 0.3, 0.8}) {
    for (double s : {0.2, 0.7, 1.0}) {
      const auto p = model(q, s).to_asc();
      EXPECT_NEAR(p.sum_ab(), -2.0 * s * q, 1e-15);
      EXPECT_NEAR(p.prod_ab(), q * q, 1e-15);
      const auto iv = model(q, s).support();
      EXPECT_GT(iv.B, std::abs(iv.A));
    }
  }
  EXPECT_THROW(model(0.5, 0.0).validate(), DomainError);
  EXPECT_THROW(model(0.5, 0.5, 1.0).validate(), DomainError);
}

TEST(AscEval, LowDegrees) {
  const AscParams p(0.3, -0.6, QBase(0.4));
  EXPECT_EQ(asc_eval(0, 0.77, p), 1.0);
  EXPECT_NEAR(asc_eval(1, 0.77, p), 2 * 0.77 - (0.3 - 0.6), 1e-15);
}

TEST(AscEval, DisplayedQuadraticWithEqualParameters) {
  for (double q : {0.25, 0.5, 0.9}) {
    const AscParams p(q, q, QBase(q));
    for (double x : {-1.0, -0.3, 0.2, 1.0}) {
      const double expected = 3 * q * q * q + q * q + q - 1 - 4 * (1 + q) * q * x + 4 * x * x;
      EXPECT_NEAR(asc_eval(2, x, p), expected, 1e-14);
    }
  }
}

TEST(AscEval, CounterexampleGapAtMinusOne) {
  for (double q : {0.25, 0.5, 0.9}) {
    const AscParams p(q, q, QBase(q));
    EXPECT_NEAR(asc_eval(2, -1.0, p) - asc_eval(2, 1.0, p), 8 * q * (1 + q), 1e-12);
  }
}

TEST(AscEval, MatchesExplicitSum) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const auto p = conj_params(u01(rng), (u01(rng) - 0.5) * kPi, 0.95 * u01(rng));
    const double theta = kPi * u01(rng);
    for (std::size_t n : {0u, 1u, 4u, 11u, 25u}) {
      const double ref = explicit_sum(n, theta, p);
      EXPECT_NEAR(asc_eval(n, std::cos(theta), p), ref, 1e-10 * std::max(1.0, std::abs(ref)));
    }
  }
}

TEST(AscEval, DegreeCap) {
  const AscParams p(0.0, 0.0, QBase(0.5));
  EXPECT_THROW(asc_eval(kMaxDegree + 1, 0.5, p), OverflowError);
}

TEST(AscAtOne, Examples) {
  const AscParams p(0.0, 0.0, QBase(0.5));
  EXPECT_EQ(asc_at_one(0, p), 1.0);
  // 1/(q;q)_2 + 1/(q;q)_1^2 + 1/(q;q)_2 at q = 1/2.
  const double qq1 = 0.5;
  const double qq2 = 0.5 * 0.75;
  EXPECT_NEAR(asc_at_one(2, p), 2.0 / qq2 + 1.0 / (qq1 * qq1), 1e-13);
  EXPECT_NEAR(asc_at_one(2, p), 9.3333333333333339, 1e-13);
}

TEST(AscAtOne, AgreesWithRecurrence) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const double q = 0.9 * u01(rng);
    const auto p = trial % 2 ? conj_params(u01(rng), (u01(rng) - 0.5) * kPi, q)
                             : AscParams(2 * u01(rng) - 1, 2 * u01(rng) - 1, QBase(q));
    for (std::size_t n = 0; n <= 30; ++n) {
      const double lhs = asc_at_one(n, p) * qpoch_finite(q, p.q, n);
      const double rhs = asc_eval(n, 1.0, p);
      EXPECT_NEAR(lhs, rhs, 1e-10 * std::max(1.0, std::abs(rhs)));
    }
  }
}

TEST(AscEval, NormalizedScaledMatchesPlain) {
  const auto p = conj_params(0.6, 0.4, 0.7);
  for (std::size_t n : {0u, 3u, 17u, 60u}) {
    const auto r = asc_eval_normalized_scaled(n, 0.3, p);
    const double plain = asc_eval(n, 0.3, p) / qpoch_finite(0.7, p.q, n);
    EXPECT_NEAR(r.value(), plain, 1e-12 * std::max(1.0, std::abs(plain)));
  }
}

TEST(AscDensity, SemicircleAtZero) {
  const AscParams p(0.0, 0.0, QBase(0.0));
  for (double x : {-0.9, -0.2, 0.0, 0.55}) {
    EXPECT_NEAR(asc_density(x, p), 2.0 / kPi * std::sqrt(1 - x * x), 1e-14);
  }
  EXPECT_THROW(asc_density(1.0, p), DomainError);
}

TEST(AscDensity, NormalizedAndOrthogonal) {
  const auto p = model(0.5, 0.7).to_asc();
  quad::Policy pol;
  pol.rel_tol = 1e-12;
  EXPECT_NEAR(integrate_asc([](double) { return 1.0; }, p, pol).value, 1.0, 1e-8);
  const double q12 = integrate_asc(
      [&](double x) { return asc_eval(1, x, p) * asc_eval(2, x, p); }, p, pol).value;
  EXPECT_NEAR(q12, 0.0, 1e-8);
  for (int n = 0; n <= 5; ++n) {
    for (int k = 0; k < n; ++k) {
      const double v = integrate_asc(
          [&](double x) { return asc_eval(n, x, p) * asc_eval(k, x, p); }, p, pol).value;
      EXPECT_NEAR(v, 0.0, 1e-8);
    }
  }
}

TEST(AscDensity, RequiresParametersInsideDisc) {
  const AscParams p(1.2, 0.5, QBase(0.5));
  EXPECT_THROW(asc_density(0.2, p), DomainError);
}

TEST(AscBounds, MaximumAtOne) {
  int pairs = 0;
  for (double r : {0.0, 0.3, 0.6, 0.9, 0.99}) {
    for (double alpha : {-kPi / 2, -0.7, 0.0, 0.7, kPi / 2}) {
      ++pairs;
      for (double q : {0.0, 0.5, 0.9}) {
        const auto p = conj_params(r, alpha, q);
        for (std::size_t n = 0; n <= 60; ++n) {
          const double top = asc_eval(n, 1.0, p);
          for (int i = 0; i < 200; ++i) {
            const double x = -1.0 + 2.0 * i / 199.0;
            ASSERT_LE(std::abs(asc_eval(n, x, p)), top + 1e-10 * std::max(1.0, top))
                << "r=" << r << " alpha=" << alpha << " q=" << q << " n=" << n;
          }
        }
      }
    }
  }
  EXPECT_EQ(pairs, 25);
}

TEST(AscBounds, LinearGrowth) {
  for (double q : {0.2, 0.6}) {
    const auto p = conj_params(0.8, 0.5, q);
    const QBase qb(q);
    for (std::size_t n = 0; n <= 60; ++n) {
      const double bound = (n + 1) * qpoch_finite(-std::abs(p.a), qb, n) *
                           qpoch_finite(-std::abs(p.b), qb, n) / qpoch_finite(q, qb, n);
      for (int i = 0; i <= 50; ++i) {
        const double x = -1.0 + 2.0 * i / 50.0;
        EXPECT_LE(std::abs(asc_eval(n, x, p)), bound * (1 + 1e-12));
      }
    }
  }
}

TEST(AscGeneratingFunction, MatchesProductRatio) {
  const auto p = conj_params(0.7, 0.9, 0.6);
  const QBase qb = p.q;
  for (Complex t : {Complex(0.3, 0.0), Complex(0.0, 0.3), Complex(-0.3, 0.0)}) {
    for (double theta : {0.2, 1.3, 2.9}) {
      Complex series = 0.0;
      Complex tn = 1.0;
      double qq = 1.0;
      for (std::size_t n = 0; n <= 120; ++n) {
        series += asc_eval(n, std::cos(theta), p) / qq * tn;
        tn *= t;
        qq *= 1.0 - std::pow(0.6, n + 1);
      }
      const Complex e = std::polar(1.0, theta);
      const Complex closed = qpoch_infinite(p.a * t, qb) * qpoch_infinite(p.b * t, qb) /
                             (qpoch_infinite(e * t, qb) * qpoch_infinite(t / e, qb));
      EXPECT_NEAR(std::abs(series - closed), 0.0, 1e-8);
    }
  }
}

TEST(SValue, Examples) {
  for (std::size_t n = 0; n <= 20; ++n) EXPECT_NEAR(s_value(n, model(0.0, 0.4)), n + 1.0, 1e-13);
  EXPECT_EQ(s_value(0, model(0.7, 0.3)), 1.0);
  const auto m = model(0.5, 1.0);
  const double B = m.support().B;
  EXPECT_NEAR(s_value(3, m), motzkin_poly_eval(3, B, m) * q_number(4, QBase(0.5)), 1e-12);
}

TEST(SValue, MatchesAscAtOne) {
  const auto m = model(0.45, 0.35);
  const auto s = s_values(40, m);
  for (std::size_t n = 0; n <= 40; ++n) EXPECT_NEAR(s[n], asc_at_one(n, m.to_asc()), 1e-12 * s[n]);
}

TEST(MotzkinPoly, LowDegreesAndConjugation) {
  const auto m = model(0.35, 0.6);
  const QBase qb(0.35);
  EXPECT_EQ(motzkin_poly_eval(0, 1.7, m), 1.0);
  EXPECT_NEAR(motzkin_poly_eval(1, 1.7, m), (1.7 - 1.2) / q_number(2, qb), 1e-15);
  const auto p = m.to_asc();
  for (double x : {-0.8, 0.1, 0.95}) {
    const double y = 2 * (x + 0.6) / (1 - 0.35);
    for (std::size_t n = 0; n <= 15; ++n) {
      const double rhs = asc_eval(n, x, p) / (q_number(n + 1, qb) * qpoch_finite(0.35, qb, n));
      EXPECT_NEAR(motzkin_poly_eval(n, y, m), rhs, 1e-11 * std::max(1.0, std::abs(rhs)));
    }
  }
}

TEST(MotzkinPoly, ValueAtBIsPi) {
  for (double q : {0.0, 0.3, 0.7}) {
    for (double s : {0.25, 1.0}) {
      const auto m = model(q, s);
      EXPECT_NEAR(motzkin_poly_eval(5, m.support().B, m), pi_value(5, m), 1e-10 * pi_value(5, m));
    }
  }
}

TEST(PiValues, ExamplesAndPositivity) {
  EXPECT_EQ(pi_value(0, model(0.4, 0.4)), 1.0);
  for (std::size_t n = 0; n < 10; ++n) {
    EXPECT_NEAR(pi_value(n, model(0.0, 0.5)), n + 1.0, 1e-13);
    EXPECT_NEAR(pi_tilde_value(n, model(0.4, 0.5)), s_value(n, model(0.4, 0.5)), 0.0);
  }
  for (double q : {0.0, 0.2, 0.5, 0.8, 0.95}) {
    for (double s : {0.05, 0.3, 0.6, 1.0}) {
      const auto m = model(q, s);
      const auto sv = s_values(200, m);
      for (std::size_t n = 0; n <= 200; ++n) {
        EXPECT_GT(sv[n] / q_number(n + 1, QBase(q)), 0.0);
      }
    }
  }
}

TEST(PiValues, RecurrenceAtRightEndpoint) {
  for (double q : {0.0, 0.3, 0.6, 0.9}) {
    for (double s : {0.1, 0.5, 1.0}) {
      const auto m = model(q, s);
      const QBase qb(q);
      const double B = m.support().B;
      const auto sv = s_values(201, m);
      auto pi = [&](std::size_t n) { return sv[n] / q_number(n + 1, qb); };
      for (std::size_t n = 0; n <= 200; ++n) {
        const double lhs = q_number(n + 2, qb) * pi(n + 1) + 2 * s * q_number(n + 1, qb) * pi(n) +
                           (n ? q_number(n, qb) * pi(n - 1) : 0.0);
        EXPECT_NEAR(lhs, B * pi(n), 1e-10 * B * pi(n));
      }
    }
  }
}

TEST(NuMeasure, NormIdentity) {
  quad::Policy pol;
  pol.rel_tol = 1e-12;
  for (double q : {0.0, 0.4, 0.75}) {
    const auto m = model(q, 0.6);
    for (std::size_t n = 0; n <= 8; ++n) {
      const double v = integrate_nu(
          [&](double y) {
            const double pn = motzkin_poly_eval(n, y, m);
            return pn * pn;
          },
          m, pol).value;
      EXPECT_NEAR(v, 1.0 / q_number(n + 1, QBase(q)), 1e-8);
    }
  }
}

TEST(NuMeasure, RestrictedRangeSplitsMass) {
  const auto m = model(0.5, 0.8);
  const auto iv = m.support();
  const double mid = 0.5 * (iv.A + iv.B);
  auto one = [](double) { return 1.0; };
  const double lo = integrate_nu(one, m, {}, -INFINITY, mid).value;
  const double hi = integrate_nu(one, m, {}, mid, INFINITY).value;
  EXPECT_NEAR(lo + hi, 1.0, 1e-10);
  EXPECT_GT(lo, 0.0);
  EXPECT_GT(hi, 0.0);
}

TEST(EndpointFixedQ, LimitsAndConvergence) {
  const auto p = model(0.5, 0.8).to_asc();
  for (double u : {0.0, 1.0, 2.0}) {
    const double target = asc_endpoint_limit_fixed_q_target(u, p);
    double prev = 1e300;
    for (std::size_t M : {100u, 200u, 400u}) {
      const double err = std::abs(asc_endpoint_limit_fixed_q(M, u, p) - target);
      EXPECT_LT(err, prev);
      prev = err;
    }
    EXPECT_LT(prev / std::abs(target), 0.02);
  }
  EXPECT_NEAR(asc_endpoint_limit_fixed_q_target(kPi, p), 0.0, 1e-15);
  double prev = 1e300;
  for (std::size_t M : {100u, 200u, 400u, 800u}) {
    const double v = std::abs(asc_endpoint_limit_fixed_q(M, kPi, p));
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(EndpointQToOne, ApproachesBesselK) {
  const double k0 = asc_endpoint_limit_q_to_1_target(0.0, 0.0);
  EXPECT_NEAR(k0, 0.42102443824070834, 1e-12);
  EXPECT_NEAR(asc_endpoint_limit_q_to_1(200, 0.0, 0.0, 1.0), k0, 0.05 * k0);
  const double target = asc_endpoint_limit_q_to_1_target(1.0, 0.5);
  double prev = 1e300;
  for (std::size_t M : {100u, 200u, 400u}) {
    const double err = std::abs(asc_endpoint_limit_q_to_1(M, 1.0, 0.5, 1.0) - target);
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_DOUBLE_EQ(asc_endpoint_limit_q_to_1(100, 1.3, 0.2, 0.6),
                   asc_endpoint_limit_q_to_1(100, -1.3, 0.2, 0.6));
  EXPECT_THROW(asc_endpoint_limit_q_to_1(10, 0.0, -10.0, 1.0), DomainError);
}
