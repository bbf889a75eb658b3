#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "common.hpp"
#include "feigen/series.hpp"
#include "feigen/solver.hpp"

using namespace feigen;
using feigen::testing::reference_fp;

namespace {

TruncatedEvenSeries sample_series(int ell) {
    return TruncatedEvenSeries(ell, {1.0, -1.5, 0.1, 0.02, -0.003, 0.0004}, 1.0);
}

}  // namespace

TEST(Series, ValueAtZeroIsOne) {
    for (int ell : {2, 4, 6}) EXPECT_EQ(sample_series(ell)(cplx{0.0, 0.0}), cplx(1.0, 0.0));
}

TEST(Series, EvenSymmetryIsExact) {
    const auto s = sample_series(2);
    for (cplx z : {cplx{0.3, 0.1}, cplx{-0.7, 0.25}, cplx{0.01, -0.9}}) EXPECT_EQ(s(z), s(-z));
}

TEST(Series, RootOfUnitySymmetryIsExactForEll4) {
    const auto s = sample_series(4);
    const cplx i{0.0, 1.0};
    for (cplx z : {cplx{0.3, 0.1}, cplx{-0.7, 0.25}, cplx{0.5, 0.5}}) {
        EXPECT_EQ(s(z), s(i * z));
        EXPECT_EQ(s(z), s(-z));
    }
}

TEST(Series, DerivativeVanishesAtCriticalPoint) {
    for (int ell : {2, 4}) EXPECT_EQ(sample_series(ell).deriv(cplx{0.0, 0.0}), cplx(0.0, 0.0));
}

TEST(Series, DerivativeMatchesCentralDifferenceToSecondOrder) {
    const auto s = sample_series(2);
    const double z = 0.37;
    const double exact = s.deriv(z);
    const double e1 = std::abs((s(z + 1e-3) - s(z - 1e-3)) / 2e-3 - exact);
    const double e2 = std::abs((s(z + 5e-4) - s(z - 5e-4)) / 1e-3 - exact);
    EXPECT_LT(e1, 1e-5);
    EXPECT_NEAR(e1 / e2, 4.0, 0.1);  // halving h quarters the error
}

TEST(Series, DerivativeAgreesWithFiniteDifferencesInTrustedDisk) {
    const auto& fp = reference_fp();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const cplx z = std::polar(fp.rho() * std::sqrt(u(rng)) * 0.95, 2.0 * std::numbers::pi * u(rng));
        const cplx h{1e-6, 0.0};
        const cplx fd = (fp.series(z + h) - fp.series(z - h)) / (2.0 * h);
        const cplx d = fp.series.deriv(z);
        EXPECT_LT(std::abs(fd - d), 1e-6 * std::max(1.0, std::abs(d))) << z;
    }
}

TEST(Series, JetMatchesValueAndDerivative) {
    const auto s = sample_series(4);
    const cplx z{0.4, -0.2};
    const auto j = s.jet(z);
    EXPECT_EQ(j.value, s(z));
    EXPECT_NEAR(std::abs(j.deriv - s.deriv(z)), 0.0, 1e-15);
}

TEST(Series, ConstructorEnforcesInvariants) {
    EXPECT_THROW(TruncatedEvenSeries(2, {0.9, -1.5}, 1.0), Error);
    EXPECT_THROW(TruncatedEvenSeries(3, {1.0, -1.5}, 1.0), Error);
    EXPECT_THROW(TruncatedEvenSeries(2, {1.0}, 1.0), Error);
    EXPECT_THROW(TruncatedEvenSeries(2, {1.0, -1.5}, 0.0), Error);
}

TEST(TrustedRadius, GeometricSeriesMatchesBruteForceTail) {
    const double q = 0.1, tol = 1e-12;
    std::vector<double> c(21);
    for (int k = 0; k <= 20; ++k) c[k] = std::pow(q, k);
    const double r = estimate_trusted_radius(c, 2, tol);
    // brute-force tail sum_{k>20} q^k u^k at u = r^2
    auto tail = [&](double rr) {
        double sum = 0.0;
        const double u = rr * rr;
        for (int k = 21; k < 2000; ++k) sum += std::pow(q * u, k);
        return sum;
    };
    EXPECT_NEAR(tail(r) / tol, 1.0, 1e-6);
    EXPECT_GT(tail(r * 1.001), tol);
}

TEST(TrustedRadius, ZeroTailGivesCap) {
    std::vector<double> c{1.0, -1.5, 0.2, 0, 0, 0, 0, 0};
    EXPECT_EQ(estimate_trusted_radius(c, 2, 1e-12), kDefaultMaxTrustedRadius);
    EXPECT_EQ(estimate_trusted_radius(c, 2, 1e-12, 2.5), 2.5);
}

TEST(TrustedRadius, GrowingTailIsRejected) {
    std::vector<double> c(21);
    for (int k = 0; k <= 20; ++k) c[k] = std::pow(1.3, k);
    EXPECT_THROW(estimate_trusted_radius(c, 2, 1e-12), NonDecayingTail);
}

TEST(TrustedRadius, NeedsFourCoefficients) {
    std::vector<double> c{1.0, -1.5, 0.1};
    EXPECT_THROW(estimate_trusted_radius(c, 2, 1e-12), Error);
}

TEST(SolvedSeries, ValueAtOneIsMinusLambda) {
    const auto& fp = reference_fp();
    EXPECT_NEAR(fp.series(1.0), -fp.lambda, 1e-14);
}

TEST(SolvedSeries, TrustedDiskCoversUnitInterval) { EXPECT_GT(reference_fp().rho(), 1.0); }

TEST(SolvedSeries, DerivativeNegativeAtX0) { EXPECT_LT(reference_fp().series.deriv(reference_fp().x0), 0.0); }

TEST(SolvedSeries, TruncationStability) {
    const RenormFixedPoint a = solve_cf(2, 30, 1e-11, 25);
    const RenormFixedPoint b = solve_cf(2, 40, 1e-11, 25);
    const double tail_tol = 1e-12;
    const double rho = std::min(a.rho(), b.rho());
    double worst = 0.0;
    for (int i = 0; i <= 40; ++i) {
        for (int j = 0; j < 16; ++j) {
            const cplx z = std::polar(rho * i / 40.0, 2.0 * std::numbers::pi * j / 16.0);
            worst = std::max(worst, std::abs(a.series(z) - b.series(z)));
        }
    }
    EXPECT_LT(worst, 10.0 * tail_tol);
}

TEST(Format, ExactRoundTrip) {
    for (double x : {0.1, 1.0 / 3.0, -1.401155e-300, 2.5e300, 0.39953528052313}) {
        EXPECT_EQ(std::stod(format_exact(x)), x);
    }
}
