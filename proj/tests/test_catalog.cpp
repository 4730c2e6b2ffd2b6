#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mbeval/catalog.hpp"

using namespace mbeval;
using namespace mbeval::catalog;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::parse;
}

const double zeta3 = 1.2020569031595942;

}  // namespace

TEST(Ising, ClosedForms) {
  EXPECT_NEAR(ising_c(1, 0, Method::closed).value, 2 * std::numbers::pi, 1e-13);
  EXPECT_NEAR(ising_c(2, 1, Method::closed).value, 1.0, 1e-14);
  EXPECT_NEAR(ising_c(3, 1, Method::closed).value, 0.781302412896486, 1e-13);
  EXPECT_NEAR(ising_c(4, 1, Method::closed).value, 7 * zeta3 / 12, 1e-14);
  EXPECT_NEAR(ising_c(4, 3, Method::closed).value, 7 * zeta3 / 1152 - 1.0 / 192, 1e-15);
}

TEST(Ising, MethodsAgree) {
  Options o;
  o.tol = 1e-10;
  for (auto [n, k] : {std::pair{2, 1}, std::pair{3, 1}, std::pair{3, 2}, std::pair{4, 1}, std::pair{4, 2}}) {
    double ref = ising_c(n, k, Method::oracle, o).value;
    EXPECT_NEAR(ising_c(n, k, Method::contour, o).value, ref, 1e-9 * std::max(1.0, ref)) << n << "," << k;
  }
  EXPECT_NEAR(ising_c(5, 1, Method::contour, o).value, ising_c(5, 1, Method::oracle, o).value, 1e-8);
}

TEST(Ising, Errors) {
  EXPECT_EQ(code_of([] { ising_c(5, 1, Method::closed); }), ErrorCode::no_closed_form);
  EXPECT_EQ(code_of([] { ising_c(3, 2, Method::closed); }), ErrorCode::no_closed_form);
  EXPECT_EQ(code_of([] { ising_c(6, 1, Method::oracle); }), ErrorCode::domain);
  EXPECT_EQ(code_of([] { ising_c(3, -1, Method::oracle); }), ErrorCode::domain);
}

TEST(IsingParam, ThreeExponents) {
  std::vector<Rational> e = {Rational(1, 2), Rational(1, 3), Rational(1, 4)};
  double closed = ising_c_param(3, 1, e, Method::closed).value;
  EXPECT_NEAR(closed, 19.9883724805395, 1e-10);
  EXPECT_NEAR(ising_c_param(3, 1, e, Method::oracle).value, closed, 1e-8);
  EXPECT_NEAR(ising_c_param(3, 1, unit_exponents(3), Method::contour).value, ising_c(3, 1, Method::closed).value, 1e-9);
  EXPECT_EQ(code_of([] { ising_c_param(3, 1, {Rational(1, 2), Rational(1, 3), Rational(2)}, Method::closed); }),
            ErrorCode::degenerate_parameters);
  EXPECT_EQ(code_of([] { ising_c_param(4, 1, unit_exponents(4), Method::closed); }), ErrorCode::no_closed_form);
  EXPECT_EQ(code_of([] { ising_c_param(3, 1, unit_exponents(4), Method::closed); }), ErrorCode::domain);
}

TEST(IsingParam, FourExponents) {
  std::vector<Rational> e = {Rational(1, 2), Rational(2, 3), Rational(3, 4), Rational(4, 5)};
  Options o;
  o.tol = 1e-10;
  EXPECT_NEAR(ising_c_param(4, 1, e, Method::contour, o).value, ising_c_param(4, 1, e, Method::oracle, o).value, 1e-8);
}

TEST(C5, Points) {
  Options o;
  o.tol = 1e-9;
  EXPECT_NEAR(c5_param(1, 1, 1, Method::contour, o).value, 0.665759800199938, 1e-8);
  EXPECT_EQ(code_of([] { c5_param(1, 1, 1, Method::closed); }), ErrorCode::no_closed_form);
  EXPECT_EQ(code_of([] { c5_param(1, 1, 1, Method::series); }), ErrorCode::no_cover);
  EXPECT_EQ(code_of([] { c5_param(1, Rational(1, 2), 1, Method::oracle); }), ErrorCode::method_unavailable);
  EXPECT_EQ(code_of([] { c5_mb(1, 0, 1); }), ErrorCode::domain);
}

TEST(Box, Values) {
  EXPECT_EQ(box_b(1, 1, Method::closed).value, 0.5);
  EXPECT_NEAR(box_b(2, 1, Method::closed).value, 0.765195716464212, 1e-14);
  EXPECT_NEAR(box_b(2, -1, Method::closed).value, 2 * std::log(1 + std::sqrt(2.0)), 1e-14);
  for (int n = 1; n <= 6; ++n) EXPECT_NEAR(box_b(n, 2, Method::oracle).value, n / 3.0, 1e-11);
  Options o;
  o.tol = 1e-9;
  EXPECT_NEAR(box_b(3, 1, Method::contour, o).value, box_b(3, 1, Method::oracle).value, 1e-8);
  EXPECT_NEAR(box_b(3, Rational(-1, 2), Method::contour, o).value, box_b(3, Rational(-1, 2), Method::oracle).value, 1e-8);
  EXPECT_NEAR(box_b(2, Rational(3, 2), Method::contour, o).value, box_b(2, Rational(3, 2), Method::closed).value, 1e-8);
}

TEST(Box, Errors) {
  EXPECT_EQ(code_of([] { box_b(3, -3, Method::oracle); }), ErrorCode::pole);
  EXPECT_EQ(code_of([] { box_b(3, 1, Method::closed); }), ErrorCode::no_closed_form);
  EXPECT_EQ(code_of([] { box_b(3, 1, Method::series); }), ErrorCode::method_unavailable);
  EXPECT_EQ(code_of([] { box_b(5, 1, Method::contour); }), ErrorCode::method_unavailable);
  EXPECT_EQ(code_of([] { box_b(3, 3, Method::contour); }), ErrorCode::infeasible);
  EXPECT_EQ(code_of([] { box_b(11, 1, Method::closed); }), ErrorCode::domain);
}

TEST(Delta, Relations) {
  EXPECT_NEAR(delta(1, 1, Method::closed).value, 1.0 / 3, 1e-14);
  EXPECT_NEAR(delta(2, 1, Method::closed).value, 0.521405433164722, 1e-13);
  EXPECT_NEAR(delta(3, 1, Method::closed).value, 0.661707182267175, 1e-12);
  for (int n = 1; n <= 5; ++n)
    EXPECT_NEAR(delta(n, 2, Method::closed).value, n / 6.0, 1e-9) << n;
  for (int n = 1; n <= 5; ++n)
    EXPECT_NEAR(delta(n, 1, Method::closed).value, catalog::detail::delta_reduction(n, 1), 1e-10) << n;
  EXPECT_NEAR(delta(2, 1, Method::oracle).value, 0.521405433164722, 5e-5);
  EXPECT_EQ(code_of([] { delta(2, 1, Method::contour); }), ErrorCode::method_unavailable);
  EXPECT_EQ(code_of([] { delta(6, 1, Method::closed); }), ErrorCode::domain);
}

TEST(Jellium, J3) {
  double j3 = jellium(3, Method::closed).value;
  EXPECT_NEAR(j3, -0.380077363979554, 1e-14);
  EXPECT_NEAR(jellium(3, Method::oracle).value, j3, 1e-12);
  EXPECT_EQ(code_of([] { jellium(4, Method::closed); }), ErrorCode::no_closed_form);
  EXPECT_EQ(code_of([] { jellium(2, Method::oracle); }), ErrorCode::domain);
}

TEST(Ruby, Values) {
  RubyInput empty{0, 3, {}, {}};
  EXPECT_NEAR(ruby(empty, Method::closed).value, 1.0 / 3, 1e-15);
  RubyInput one{0, 2, {0}, {1}};
  EXPECT_NEAR(ruby(one, Method::series).value, 1 / std::sqrt(5.0), 1e-13);
  EXPECT_NEAR(ruby(one, Method::contour).value, 1 / std::sqrt(5.0), 1e-9);
  EXPECT_NEAR(ruby(one, Method::oracle).value, 1 / std::sqrt(5.0), 1e-11);
  RubyInput near{0, Rational(1, 2), {0}, {1}};
  EXPECT_NEAR(ruby(near, Method::series).value, 1 / std::sqrt(1.25), 1e-12);
  RubyInput two{1, 3, {1, 0}, {1, Rational(3, 2)}};
  EXPECT_NEAR(ruby(two, Method::series).value, ruby(two, Method::oracle).value, 1e-11);
}

TEST(Ruby, Errors) {
  EXPECT_EQ(code_of([] { ruby({0, 1, {0, 0}, {1, 1}}, Method::series); }), ErrorCode::outside_roc);
  EXPECT_EQ(code_of([] { ruby({0, 1, {0}, {}}, Method::closed); }), ErrorCode::domain);
  EXPECT_EQ(code_of([] { ruby({0, -1, {0}, {1}}, Method::closed); }), ErrorCode::domain);
  EXPECT_EQ(code_of([] { ruby({2, 3, {1, 0}, {1, 1}}, Method::closed); }), ErrorCode::no_closed_form);
}

TEST(H1, ClosedForm) {
  EXPECT_NEAR(h1_closed(1, 1), std::numbers::pi * std::numbers::pi / 4, 1e-13);
  EXPECT_NEAR(h1_closed(2, 1), h1_closed(1, 2), 1e-13);
  EXPECT_NEAR(h1_closed(1, 2), 1.69372342888408, 1e-12);
}
