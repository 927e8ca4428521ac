#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "qmotzkin/chains.hpp"
#include "qmotzkin/errors.hpp"
#include "qmotzkin/kernels.hpp"
#include "qmotzkin/qspecial.hpp"
#include "qmotzkin/quadrature.hpp"

using namespace qmotzkin;
using namespace qmotzkin::kernels;

namespace {

constexpr double kPi = std::numbers::pi;

QModelParams qparams(double q, double sigma) {
  QModelParams p;
  p.q = q;
  p.sigma = sigma;
  return p;
}

double integral(const std::function<double(double)>& f, double a, double b,
                double tol = 1e-13) {
  quad::Policy pol;
  pol.rel_tol = tol;
  pol.max_nodes = 1 << 18;
  return quad::integrate(f, a, b, pol).value;
}

// K_{iu}(X) by the trapezoid rule in t with step 0.01.
double trapezoid_k(double u, double X) {
  const double h = 0.01;
  double s = 0.5;
  for (int k = 1;; ++k) {
    const double t = k * h;
    const double e = std::exp(-X * std::cosh(t));
    if (e < 1e-300) break;
    s += e * std::cos(u * t) / std::exp(-X);
  }
  return h * s * std::exp(-X);
}

// p_t(x, y) by the trapezoid rule in u with step 0.01.
double trapezoid_yakubovich(double t, double x, double y) {
  const double h = 0.01;
  double s = 0.0;
  for (int k = 1; k * h < 14.0; ++k) {
    const double u = k * h;
    s += std::exp(-t * u * u / 2.0) * trapezoid_k(u, std::exp(-x)) *
         trapezoid_k(u, std::exp(-y)) * u * std::sinh(kPi * u) / kPi;
  }
  return 2.0 / kPi * h * s;
}

}  // namespace

TEST(KilledBM, SymmetricPointValue) {
  EXPECT_NEAR(killed_bm_kernel(1, 1, 1), 0.3449513138882447, 1e-15);
  EXPECT_NEAR(killed_bm_kernel(1, 1, 1), (1 - std::exp(-2.0)) / std::sqrt(2 * kPi), 1e-15);
  EXPECT_NEAR(killed_bm_kernel(0.7, 0.4, 1.3), killed_bm_kernel(0.7, 1.3, 0.4), 1e-16);
  EXPECT_LT(killed_bm_kernel(1, 1, 1e-9), 1e-8);
  EXPECT_THROW(killed_bm_kernel(0, 1, 1), DomainError);
  EXPECT_THROW(killed_bm_kernel(1, -1, 1), DomainError);
}

TEST(KilledBM, SurvivalMassMatchesErf) {
  const double mass = integral([](double y) { return killed_bm_kernel(1, 1, y); }, 0, 40);
  EXPECT_NEAR(mass, std::erf(1 / std::sqrt(2.0)), 1e-10);
  EXPECT_LT(mass, 1.0);
  for (double y : {0.1, 0.5, 1.0, 3.0}) {
    EXPECT_LE(killed_bm_kernel(1, 1, y), std::exp(-(y - 1) * (y - 1) / 2) / std::sqrt(2 * kPi));
  }
}

TEST(KilledBM, ChapmanKolmogorov) {
  const double lhs = integral(
      [](double z) { return killed_bm_kernel(0.5, 1, z) * killed_bm_kernel(0.5, z, 1.5); }, 0,
      30);
  EXPECT_NEAR(lhs, killed_bm_kernel(1, 1, 1.5), 1e-6);
}

TEST(Bessel3d, IntegratesToOne) {
  for (double x : {0.3, 1.0, 2.5}) {
    for (double sigma : {0.2, 1.0}) {
      const double mass = integral(
          [&](double y) { return bessel3d_transition({1.0, x, y, sigma}); }, 0, 40);
      EXPECT_NEAR(mass, 1.0, 1e-8);
    }
  }
}

TEST(Bessel3d, TimeDilationAndSymmetry) {
  EXPECT_NEAR(bessel3d_transition({1.0, 0.8, 1.4, 1.0}),
              1.4 / 0.8 * killed_bm_kernel(0.5, 0.8, 1.4), 1e-15);
  const double xy = bessel3d_transition({0.9, 0.8, 1.4, 0.3});
  const double yx = bessel3d_transition({0.9, 1.4, 0.8, 0.3});
  EXPECT_NEAR(xy * 0.8 / 1.4, yx * 1.4 / 0.8, 1e-15);
}

TEST(Xi0, DensityFacts) {
  EXPECT_NEAR(xi0_density(1, 1), std::exp(-1.0), 1e-16);
  EXPECT_EQ(xi0_density(-1, 1), 0.0);
  for (double c : {0.5, 1.0, 3.0}) {
    EXPECT_NEAR(integral([&](double x) { return xi0_density(x, c); }, 0, 200 / c), 1.0, 1e-10);
    const double mode = 1 / c;
    EXPECT_GT(xi0_density(mode, c), xi0_density(mode * 1.01, c));
    EXPECT_GT(xi0_density(mode, c), xi0_density(mode * 0.99, c));
  }
  EXPECT_THROW(xi0_density(1, 0), DomainError);
}

TEST(BesselK0, SmallArgumentBranchIsContinuous) {
  const double s = 2e-8;
  EXPECT_NEAR(bessel_k0(s), qspecial::bessel_k_imag(0, s), 1e-10);
  EXPECT_NEAR(bessel_k0(1.0), 0.42102443824070834, 1e-12);
  EXPECT_NEAR(log_bessel_k0(599.0), std::log(qspecial::bessel_k_imag(0, 599.0)), 1e-11);
  EXPECT_NEAR(log_bessel_k0(601.0), std::log(qspecial::bessel_k_imag(0, 601.0)), 1e-11);
  EXPECT_TRUE(std::isfinite(log_bessel_k0(5000.0)));
  EXPECT_TRUE(bessel_accuracy_warning(20.0));
  EXPECT_FALSE(bessel_accuracy_warning(5.0));
}

TEST(Yakubovich, MatchesTrapezoidOracle) {
  for (auto [t, x, y] : {std::tuple{1.0, 0.0, 0.5}, std::tuple{0.5, -0.5, 1.0},
                         std::tuple{2.0, 1.0, 1.0}}) {
    const double want = trapezoid_yakubovich(t, x, y);
    EXPECT_NEAR(yakubovich_kernel({t, x, y, 1.0}), want, 1e-9 * std::max(1.0, want))
        << t << ' ' << x << ' ' << y;
  }
}

TEST(Yakubovich, SymmetricAndNonnegative) {
  for (double x : {-1.0, 0.0, 0.7}) {
    for (double y : {-0.5, 0.3, 2.0}) {
      const double a = yakubovich_kernel({0.8, x, y, 1.0});
      const double b = yakubovich_kernel({0.8, y, x, 1.0});
      EXPECT_NEAR(a, b, 1e-13);
      EXPECT_GE(a, 0.0);
    }
  }
}

TEST(Yakubovich, DecaysForLargeTime) {
  const double p1 = yakubovich_kernel({1.0, 0.0, 0.0, 1.0});
  const double p5 = yakubovich_kernel({5.0, 0.0, 0.0, 1.0});
  const double p50 = yakubovich_kernel({50.0, 0.0, 0.0, 1.0});
  EXPECT_GT(p1, p5);
  EXPECT_GT(p5, p50);
  EXPECT_LT(p50, 0.02);
  EXPECT_NEAR(yakubovich_cutoff(50.0), 10.0, 0.0);
  EXPECT_NEAR(yakubovich_cutoff(0.2), 20.0, 1e-12);
}

TEST(Zeta, TransitionIntegratesToOne) {
  const double mass = integral(
      [](double y) { return zeta_transition({1.0, 0.0, y, 1.0}); }, -8.0, 16.0, 1e-10);
  EXPECT_NEAR(mass, 1.0, 1e-6);
  const double raw = integral(
      [](double y) {
        return bessel_k0(std::exp(-y)) / bessel_k0(1.0) * yakubovich_kernel({1.0, 0.0, y, 1.0});
      },
      -8.0, 16.0, 1e-10);
  EXPECT_NEAR(raw, 1.0, 1e-6);
}

TEST(Zeta, ChapmanKolmogorov) {
  const double direct = zeta_transition({1.0, 0.0, 0.5, 1.0});
  const double composed = integral(
      [](double z) {
        return zeta_transition({0.5, 0.0, z, 1.0}) * zeta_transition({0.5, z, 0.5, 1.0});
      },
      -8.0, 14.0, 1e-9);
  EXPECT_NEAR(composed, direct, 1e-4);
}

TEST(Zeta, InitialDensity) {
  for (double c : {1.0, 2.0, 3.5}) {
    const double mass =
        integral([&](double x) { return zeta0_density(x, c); }, -8.0, 40.0 / c + 10.0, 1e-11);
    EXPECT_NEAR(mass, 1.0, 1e-7) << c;
  }
  EXPECT_NEAR(zeta0_density(0.3, 2.0), std::exp(-0.6) * bessel_k0(std::exp(-0.3)), 1e-15);
  EXPECT_NEAR(zeta0_density(0.0, 2.0), 0.421024, 1e-6);
}

TEST(IndexMap, Centering) {
  const IndexMap J(10000, 1.0);
  EXPECT_EQ(J.centering(), 529);
  EXPECT_EQ(J(0.0), 529);
  EXPECT_EQ(J(0.5), 579);
  EXPECT_EQ(J(-0.013), 527);
  EXPECT_THROW(IndexMap(0, 1.0), DomainError);
}

TEST(LocalLimitFixedQ, ErrorSmallAndDecreasing) {
  const auto p = qparams(0.5, 1.0);
  const auto r2500 = local_limit_error_fixed_q(2500, 1, 1, 1, p);
  const auto r10000 = local_limit_error_fixed_q(10000, 1, 1, 1, p);
  EXPECT_LT(r2500.rel_err, 0.05);
  EXPECT_LT(r10000.rel_err, r2500.rel_err);
  EXPECT_NEAR(r2500.rhs, bessel3d_transition({1, 1, 1, 1}), 0.0);
}

TEST(LocalLimitFixedQ, UnreachableTargetHasZeroMass) {
  const auto r = local_limit_error_fixed_q(400, 1, 1, 25, qparams(0.5, 1.0));
  EXPECT_EQ(r.lhs, 0.0);
}

TEST(InitialLimitFixedQ, GammaLimitAndMass) {
  const auto p = qparams(0.5, 1.0);
  EXPECT_LT(initial_limit_fixed_q(10000, 1, 1, p).rel_err, 0.03);
  const auto small = initial_limit_fixed_q(10000, 0.01, 1, p);
  EXPECT_LT(small.lhs, 0.02);
  EXPECT_LT(small.rhs, 0.01);
  const std::size_t N = 400;
  const double rn = std::sqrt(static_cast<double>(N));
  double riemann = 0.0;
  for (int j = 0; j < 2000; ++j) {
    riemann += initial_limit_fixed_q(N, (j + 0.5) / rn, 1, p).lhs / rn;
  }
  EXPECT_NEAR(riemann, 1.0, 1e-9);
}

TEST(LocalLimitQTo1, ErrorAndAsymmetry) {
  const auto r = local_limit_error_q_to_1(2500, 1, 0, 0, 1.0);
  EXPECT_LT(r.rel_err, 0.10);
  EXPECT_GE(r.lhs, 0.0);
  const auto xy = local_limit_error_q_to_1(2500, 1, -0.5, 0.5, 1.0);
  const auto yx = local_limit_error_q_to_1(2500, 1, 0.5, -0.5, 1.0);
  const double k_ratio = bessel_k0(std::exp(-0.5)) / bessel_k0(std::exp(0.5));
  EXPECT_NEAR(xy.rhs / yx.rhs, k_ratio * k_ratio, 1e-9);
  EXPECT_EQ(xy.lhs > yx.lhs, xy.rhs > yx.rhs);
  EXPECT_GE(xy.lhs, 0.0);
  EXPECT_GE(yx.lhs, 0.0);
}

TEST(InitialLimitQTo1, BesselLimit) {
  const auto r = initial_limit_q_to_1(10000, 0, 1, 1.0);
  EXPECT_LT(r.rel_err, 0.10);
  EXPECT_GE(r.lhs, 0.0);
  EXPECT_NEAR(initial_limit_q_to_1(400, 0, 2, 1.0).rhs, 0.421024, 1e-6);
}

TEST(JointMass, FixedQSurrogate) {
  EXPECT_LT(joint_mass_fixed_q(2500, 1, 1, 1, qparams(0.5, 1.0)).rel_err, 0.10);
}

TEST(JointMass, QTo1Surrogate) {
  EXPECT_LT(joint_mass_q_to_1(2500, 0, 0, 1, 1.0).rel_err, 0.15);
}

TEST(ErrorTable, CsvLayout) {
  const std::vector<ErrorRow> rows{{400, 1.0, 1.0, 1.0, {0.5, 0.25, 1.0}}};
  EXPECT_EQ(error_table_csv(rows), "N,t,x,y,lhs,rhs,rel_err\n400,1,1,1,0.5,0.25,1\n");
}
