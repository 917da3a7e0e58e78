#include <gtest/gtest.h>

#include "hsl/numeric.hpp"

using namespace hsl;

namespace {

Engine& engine() {
  static Engine e(EngineConfig{0, std::nullopt});
  return e;
}

const Mat2 kS{1.0, Cplx(1, 1), Cplx(1, -1), 0.0};

}  // namespace

TEST(ThetaN1, LeadingTerms) {
  const Cplx tau(0.3, 3);
  const Cplx q = std::exp(Cplx(0, 2 * kPi) * tau);
  const Cplx v = eval_theta_n1(engine(), 1, tau, 8);
  EXPECT_LT(std::abs(v - (1.0 + 480.0 * q + 61920.0 * q * q)), 1e-12);
  EXPECT_NEAR(std::abs(eval_theta_n1(engine(), 1, Cplx(0, 10), 8) - 1.0), 0, 1e-15);
}

TEST(ThetaN1, LatticesShareTheSeries) {
  const Cplx tau(0.1, 0.9);
  const Cplx v1 = eval_theta_n1(engine(), 1, tau, 8);
  EXPECT_EQ(eval_theta_n1(engine(), 2, tau, 8), v1);
  EXPECT_EQ(eval_theta_n1(engine(), 3, tau, 8), v1);
  EXPECT_THROW(eval_theta_n1(engine(), 1, Cplx(0.1, 0), 8), DomainError);
  EXPECT_THROW(eval_theta_n1(engine(), 1, Cplx(0.1, -1), 8), DomainError);
}

TEST(SlashN1, Examples) {
  const NumericCheck t = slash_check_n1(engine(), 1, {1, 1, 0, 1}, Cplx(0.3, 1.1), 40);
  EXPECT_LT(t.residual, 1e-12);
  const NumericCheck s = slash_check_n1(engine(), 2, {0, -1, 1, 0}, Cplx(0, 1), 40);
  EXPECT_LT(s.residual, 1e-6);
  EXPECT_TRUE(s.pass());
  const NumericCheck g = slash_check_n1(engine(), 3, {2, 1, 1, 1}, Cplx(0.2, 1.3), 40, 1e-5);
  EXPECT_TRUE(g.pass()) << g.residual;
  EXPECT_EQ(g.params["coefficients_above"], "rank16-oracle");
  EXPECT_THROW(slash_check_n1(engine(), 1, {1, 1, 1, 1}, Cplx(0, 1), 40), DomainError);
}

TEST(SlashN1, ResidualShrinksWithTruncation) {
  double last = 1e300;
  for (const std::int64_t B : {2, 4, 8, 16, 40}) {
    const double r = slash_check_n1(engine(), 1, {0, -1, 1, 0}, Cplx(0.3, 1.1), B).residual;
    EXPECT_LE(r, last + 1e-12) << B;
    last = r;
  }
  EXPECT_LT(last, 1e-6);
}

TEST(SlashN2, Examples) {
  const NumericCheck t = slash_check_n2(engine(), single(1), Gamma2::translation(kS), "translation",
                                        Mat2::diag(Cplx(0.1, 1.2), Cplx(0, 1.4)), 6, 1e-4);
  EXPECT_LT(t.residual, 1e-12);
  const NumericCheck u = slash_check_n2(engine(), single(2), Gamma2::unit_block(Mat2::diag(Cplx(0, 1), 1.0)),
                                        "unit-block", Mat2::diag(Cplx(0, 1.2), Cplx(0, 1.4)), 6, 1e-5);
  EXPECT_TRUE(u.pass()) << u.residual;
  const NumericCheck s = slash_check_n2(engine(), single(3), Gamma2::inversion(), "inversion",
                                        Mat2::diag(Cplx(0, 1), Cplx(0, 1)), 8, 1e-4);
  EXPECT_TRUE(s.pass()) << s.residual;
}

TEST(SlashN2, OffDiagonalPointAndCombination) {
  // A monomial unit block swaps the coordinates and keeps traces, so both
  // sides see the same truncated set of terms.
  const Mat2 tau{Cplx(0.1, 1.3), Cplx(0.05, 0.1), Cplx(-0.05, 0.1), Cplx(-0.2, 1.4)};
  ASSERT_TRUE(in_h2(tau));
  const Gamma2 g = Gamma2::unit_block(Mat2{0.0, 1.0, Cplx(0, 1), 0.0});
  ASSERT_TRUE(in_h2(g.apply(tau)));
  const NumericCheck c = slash_check_n2(engine(), Combo::cusp2(), g, "unit-block", tau, 8, 1e-6);
  EXPECT_TRUE(c.pass()) << c.residual;
}

TEST(SlashN2, DomainErrors) {
  EXPECT_THROW(Gamma2::translation(Mat2{1.0, Cplx(1, 1), Cplx(1, 1), 0.0}), DomainError);
  EXPECT_THROW(Gamma2::translation(Mat2{0.5, 0.0, 0.0, 0.0}), DomainError);
  EXPECT_THROW(Gamma2::unit_block(Mat2::diag(2.0, 1.0)), DomainError);
  EXPECT_THROW(slash_check_n2(engine(), single(1), Gamma2::identity(), "identity", Mat2::diag(Cplx(0, -1), Cplx(0, 1)), 4,
                              1e-4),
               DomainError);
}

TEST(SlashN2, InversionResidualShrinksWithTruncation) {
  double last = 1e300;
  for (const std::int64_t B : {4, 6, 8}) {
    const double r = slash_check_n2(engine(), single(1), Gamma2::inversion(), "inversion",
                                    Mat2::diag(Cplx(0, 1), Cplx(0, 1)), B, 1.0)
                         .residual;
    EXPECT_LE(r, last + 1e-12) << B;
    last = r;
  }
  const Mat2 tau = Mat2::diag(Cplx(0, 1.2), Cplx(0, 1.2));
  EXPECT_GT(tail_estimate_n2(engine(), 1, tau, 4), tail_estimate_n2(engine(), 1, tau, 8));
}

TEST(Shimura, Examples) {
  const Mat2 tau{Cplx(0, 1.1), 0.0, 0.0, Cplx(0.1, 0.9)};
  EXPECT_LT(shimura_lemma_check(Gamma2::identity(), "identity", tau, 1e-5).residual, 1e-9);
  EXPECT_LT(shimura_lemma_check(Gamma2::translation(kS), "translation", tau, 1e-5).residual, 1e-9);
  const NumericCheck inv = shimura_lemma_check(Gamma2::inversion(), "inversion", tau, 1e-5);
  EXPECT_LT(inv.residual, 1e-4);
  EXPECT_THROW(shimura_lemma_check(Gamma2::inversion(), "inversion", tau, 1e-3), DomainError);
  EXPECT_THROW(shimura_lemma_check(Gamma2::inversion(), "inversion", Mat2::diag(Cplx(0, 1), Cplx(0, -1)), 1e-5),
               DomainError);
}

TEST(Shimura, GenericPointAndComposite) {
  const Mat2 tau{Cplx(0.2, 1.3), Cplx(0.1, 0.2), Cplx(-0.1, 0.1), Cplx(-0.3, 1.1)};
  ASSERT_TRUE(in_h2(tau));
  const Gamma2 g = Gamma2::inversion() * Gamma2::translation(kS) * Gamma2::unit_block(Mat2{1.0, Cplx(0, 1), 0.0, 1.0});
  EXPECT_LT(shimura_lemma_check(g, "composite", tau, 1e-5).residual, 1e-4);
  EXPECT_LT(shimura_lemma_check(Gamma2::identity(), "identity", tau, 1e-6).residual, 1e-9);
}

TEST(AutomorphyFactors, Conventions) {
  const Mat2 tau{Cplx(0.2, 1.3), Cplx(0.1, 0.2), Cplx(-0.1, 0.1), Cplx(-0.3, 1.1)};
  const Gamma2 j = Gamma2::inversion();
  const Mat2 mu = j.mu(tau);
  const Mat2 lam = j.lambda(tau);
  EXPECT_LT((mu - tau).max_abs(), 1e-15);
  EXPECT_LT((lam - tau.transpose()).max_abs(), 1e-15);
  EXPECT_LT((j.apply(tau) + tau.inverse()).max_abs(), 1e-12);
}

TEST(FdVsFourier, Examples) {
  for (int i = 1; i <= 3; ++i) {
    const NumericCheck x = fd_vs_fourier_n2(engine(), i, Cplx(0, 1.2), Cplx(0, 1.2), 8, 1e-4);
    EXPECT_LT(x.residual, 1e-6);
    const NumericCheck y = fd_vs_fourier_n2(engine(), i, Cplx(0, 1.2), Cplx(0, 1.2), 8, 1e-4, OffDiagonal::y);
    EXPECT_LT(y.residual, 1e-6);
    EXPECT_NEAR(x.residual, y.residual, 1e-9);
  }
  EXPECT_THROW(fd_vs_fourier_n2(engine(), 1, Cplx(0, 0.9), Cplx(0, 1.2), 8, 1e-4), DomainError);
}

TEST(FdVsFourier, OffDiagonalBasePoint) {
  // Away from x = y = 0 the derivative itself is not zero.
  for (const auto coord : {OffDiagonal::x, OffDiagonal::y}) {
    const NumericCheck c = fd_vs_fourier_n2(engine(), 2, Cplx(0.1, 1.2), Cplx(0, 1.3), 8, 1e-4, coord, 1e-6,
                                            Cplx(0.1, 0.05), Cplx(-0.05, 0.1));
    EXPECT_TRUE(c.pass()) << c.residual;
    const Json d = c.params["derivative"];
    EXPECT_GT(std::hypot(d[0].get<double>(), d[1].get<double>()), 1e-3);
  }
}

TEST(FdVsFourier, LargerImaginaryPartGivesSmallerResidual) {
  const Cplx x0(0.1, 0.05);
  const Cplx y0(-0.05, 0.1);
  const double near = fd_vs_fourier_n2(engine(), 1, Cplx(0, 1.0), Cplx(0, 1.0), 8, 1e-4, OffDiagonal::x, 1, x0, y0).residual;
  const double far = fd_vs_fourier_n2(engine(), 1, Cplx(0, 2.0), Cplx(0, 2.0), 8, 1e-4, OffDiagonal::x, 1, x0, y0).residual;
  EXPECT_LT(far, near);
}

TEST(NumericCheck, JsonShape) {
  const NumericCheck c = shimura_lemma_check(Gamma2::identity(), "identity", Mat2::diag(Cplx(0, 1), Cplx(0, 1)), 1e-5);
  const Json j = c.to_json();
  for (const char* k : {"check", "params", "residual", "pass", "tolerance"}) EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_EQ(j["pass"], true);
}
