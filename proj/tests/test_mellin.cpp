#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mbeval/catalog.hpp"
#include "mbeval/mellin.hpp"

using namespace mbeval;
using namespace mbeval::mellin;
namespace cat = mbeval::catalog;

namespace {

MBIntegrand h1_at(Rational a, Rational b) {
  auto mb = cat::h1_mb();
  return bind_params(mb, {{mb.symbols.id("a"), a}, {mb.symbols.id("b"), b}});
}

bool has_gamma(const MBIntegrand& mb, const LinearForm& arg, int mult) {
  return std::any_of(mb.term.gammas.begin(), mb.term.gammas.end(),
                     [&](const GammaFactor& g) { return g.arg == arg && g.mult == mult; });
}

}  // namespace

TEST(DeriveMB, H1) {
  auto mb = cat::h1_mb();
  ASSERT_EQ(mb.dim(), 1);
  auto z = LinearForm::symbol(mb.z[0]);
  EXPECT_EQ(mb.term.prefactor, Rational(1, 4));
  EXPECT_TRUE(has_gamma(mb, -z, 2));
  EXPECT_TRUE(has_gamma(mb, z + Rational(1, 2), 2));
  EXPECT_EQ(mb.term.powers.at(mb.symbols.id("a")), z * -2 - 1);
  EXPECT_EQ(mb.term.powers.at(mb.symbols.id("b")), z * 2);
}

TEST(DeriveMB, C31) {
  auto m = cat::ising_mb(3, 1, cat::unit_exponents(3));
  ASSERT_FALSE(m.zero_fold);
  auto z = LinearForm::symbol(m.mb.z[0]);
  EXPECT_EQ(m.mb.term.prefactor, Rational(1, 3));
  EXPECT_TRUE(has_gamma(m.mb, -z, 4));
  EXPECT_TRUE(has_gamma(m.mb, z + 1, 2));
  EXPECT_TRUE(has_gamma(m.mb, z * -2, -1));
}

TEST(DeriveMB, C5) {
  auto mb = cat::c5_mb(3, 1, 1);
  ASSERT_EQ(mb.dim(), 2);
  auto z1 = LinearForm::symbol(mb.z[0]), z2 = LinearForm::symbol(mb.z[1]);
  EXPECT_EQ(mb.term.prefactor, Rational(1, 60));
  EXPECT_TRUE(has_gamma(mb, -z1, 4));
  EXPECT_TRUE(has_gamma(mb, -z2, 4));
  EXPECT_TRUE(has_gamma(mb, z1 + z2 + 2, 2));
  EXPECT_TRUE(has_gamma(mb, LinearForm(4), -1));
}

TEST(DeriveMB, Errors) {
  auto s = cat::h1_bracket_series();
  try {
    derive_mb(s, {s.indices[0], s.indices[1]});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::negative_dimension);
  }
}

TEST(ChooseContour, OneFoldExamples) {
  auto c3 = choose_contour(cat::ising_mb(3, 1, cat::unit_exponents(3)).mb);
  EXPECT_EQ(c3.c[0], Rational(-1, 2));
  EXPECT_EQ(c3.margin, Rational(1, 2));
  auto h = choose_contour(h1_at(1, 1));
  EXPECT_EQ(h.c[0], Rational(-1, 4));
  EXPECT_EQ(h.margin, Rational(1, 4));
}

TEST(ChooseContour, BoxSlacksPositive) {
  auto mb = cat::box_mb(3, Rational(-1, 2));
  auto c = choose_contour(mb);
  EXPECT_GT(c.margin, 0);
  EXPECT_EQ(contour_slack(mb, c.c), c.margin);
  for (const auto& g : mb.term.gammas) {
    if (g.mult < 0 || g.arg.is_constant()) continue;
    Rational v = g.arg.constant();
    for (std::size_t i = 0; i < mb.z.size(); ++i) v += g.arg.coeff(mb.z[i]) * c.c[i];
    EXPECT_GT(v, 0);
  }
}

TEST(ChooseContour, Infeasible) {
  try {
    MBIntegrand mb;
    int z = mb.symbols.fresh("z", SymbolKind::contour_variable);
    mb.z.push_back(z);
    mb.term.add_gamma(-LinearForm::symbol(z), 1);
    mb.term.add_gamma(LinearForm::symbol(z) - 1, 1);
    choose_contour(mb);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::infeasible);
  }
}

TEST(EvalContour, Examples) {
  ContourOptions o{1e-11};
  EXPECT_NEAR(eval_contour(h1_at(1, 1), o).value, std::numbers::pi * std::numbers::pi / 4, 1e-10);
  EXPECT_NEAR(eval_contour(cat::ising_mb(4, 1, cat::unit_exponents(4)).mb, o).value, 7 * 1.2020569031595942 / 12,
              1e-10);
  auto r = eval_contour(h1_at(1, 1), o);
  EXPECT_LE(r.abs_err_est, 1e-11);
  EXPECT_LT(r.imag_residual, 1e-11);
}

TEST(EvalContour, H1EllipticBookkeeping) {
  ContourOptions o{1e-11};
  for (auto [a, b] : {std::pair{1, 2}, std::pair{1, 1}, std::pair{2, 1}})
    EXPECT_NEAR(eval_contour(h1_at(a, b), o).value, cat::h1_closed(a, b), 1e-9) << a << "/" << b;
}

TEST(EvalContour, ShiftInvariance) {
  for (const auto& mb : {h1_at(1, 2), cat::ising_mb(3, 1, cat::unit_exponents(3)).mb, cat::box_mb(2, Rational(-1, 3))}) {
    auto c1 = choose_contour(mb);
    auto c2 = shifted_contour(mb, c1);
    EXPECT_NE(c1.c, c2.c);
    ContourOptions o{1e-11};
    EXPECT_NEAR(eval_contour(mb, c1, o).value, eval_contour(mb, c2, o).value, 2e-11);
  }
}

TEST(EvalContour, ConjugateSymmetry) {
  auto mb = cat::c5_mb(1, Rational(1, 3), Rational(2, 5));
  CompiledIntegrand f(mb);
  for (double y : {0.3, 1.7, 4.0}) {
    std::vector<cdouble> z = {{-0.3, y}, {-0.2, -0.5 * y}}, zc = {std::conj(z[0]), std::conj(z[1])};
    cdouble a = f.value(z), b = f.value(zc);
    EXPECT_NEAR(std::abs(a - std::conj(b)), 0.0, 1e-12 * std::abs(a));
  }
}

TEST(Json, RoundTrip) {
  auto mb = cat::h1_mb();
  auto back = from_json(to_json(mb));
  EXPECT_EQ(to_json(back).dump(), to_json(mb).dump());
  auto bound = bind_params(back, param_values(back, {{"a", 1}, {"b", 1}}));
  EXPECT_NEAR(eval_contour(bound).value, std::numbers::pi * std::numbers::pi / 4, 1e-9);
}

TEST(Json, Errors) {
  EXPECT_THROW(from_json(nlohmann::json::parse(R"({"schema":2,"dim":1})")), Error);
  EXPECT_THROW(from_json(nlohmann::json::parse(R"({"schema":1,"dim":1,"num":[]})")), Error);
  EXPECT_THROW(from_json(nlohmann::json::parse(R"({"schema":1,"dim":1,"num":[{"coeffs":{"w":"1"}}]})")), Error);
  auto mb = cat::h1_mb();
  EXPECT_THROW(param_values(mb, {{"a", 1}}), Error);
}
