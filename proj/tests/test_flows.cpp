#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "iwo/flows.hpp"
#include "oracles.hpp"

using iwo::LieElement;
using iwo::QMatrix;
using iwo::QVector;
using iwo::Rational;
using iwo::RMatrix;
using iwo::RVector;
using iwo::Signature;

namespace {

double max_diff(const RMatrix& a, const RMatrix& b) {
  double worst = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) worst = std::max(worst, std::abs(a(r, c) - b(r, c)));
  return worst;
}

double max_diff(const RVector& a, const RVector& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

// The single positive root vector of so(2,1).
LieElement n21() {
  const Signature sig(2, 1);
  QMatrix m(3, 3);
  m(0, 1) = Rational(1);
  m(1, 0) = Rational(-1);
  m(0, 2) = Rational(1);
  m(2, 0) = Rational(1);
  return {sig, m};
}

}  // namespace

TEST(ExpNilpotent, SoTwoOneExample) {
  const LieElement x = n21();
  ASSERT_TRUE(iwo::n_membership(x));
  const QMatrix x2 = x.matrix() * x.matrix();
  EXPECT_FALSE(x2.is_zero());
  EXPECT_TRUE((x2 * x.matrix()).is_zero());
  const auto g = iwo::exp_nilpotent(x);
  EXPECT_EQ(g.mat, QMatrix::identity(3) + x.matrix() + Rational(1, 2) * x2);
  EXPECT_TRUE(iwo::is_in_opq(g.mat, x.sig()));
}

TEST(ExpNilpotent, ZeroAndInverse) {
  const Signature sig(4, 2);
  EXPECT_EQ(iwo::exp_nilpotent(LieElement(sig, QMatrix(6, 6))).mat, QMatrix::identity(6));
  const auto n = iwo::build_n(sig);
  oracle::Gen gen(12);
  for (int trial = 0; trial < 20; ++trial) {
    QMatrix m(6, 6);
    for (const auto& b : n.elements) m += gen.rational(4) * b.matrix();
    const LieElement x(sig, m);
    const auto g = iwo::exp_nilpotent(x);
    const auto h = iwo::exp_nilpotent(LieElement(sig, -m));
    ASSERT_EQ(g.mat * h.mat, QMatrix::identity(6));
    ASSERT_TRUE(iwo::is_in_opq(g.mat, sig));
  }
}

TEST(ExpNilpotent, RejectsNonNilpotent) {
  const Signature sig(3, 2);
  EXPECT_THROW(iwo::exp_nilpotent(iwo::detail::boost(sig, 3, 4)), iwo::DomainError);
  EXPECT_THROW(iwo::exp_nilpotent(iwo::detail::rotation(sig, 1, 2)), iwo::DomainError);
}

TEST(ExpNilpotent, FixesTheNullAxisInTwoOne) {
  const Signature sig(2, 1);
  const QVector axis = iwo::basis_vector(sig, 2) - iwo::basis_vector(sig, 3);
  const auto g = iwo::exp_nilpotent(Rational(7, 3) * n21());
  EXPECT_EQ(g.apply(axis), axis);
}

TEST(ExpA, LogTwoIsRational) {
  const Signature sig(2, 1);
  const std::vector<int> one{1};
  const auto g = iwo::exp_a_log2(sig, one);
  EXPECT_EQ(g.mat(1, 1), Rational(5, 4));
  EXPECT_EQ(g.mat(1, 2), Rational(3, 4));
  EXPECT_EQ(g.mat(0, 0), Rational(1));
  EXPECT_TRUE(iwo::is_in_opq(g.mat, sig));
  const std::vector<double> c{std::log(2.0)};
  EXPECT_LT(max_diff(iwo::exp_a(sig, c).mat, iwo::to_double(g.mat)), 1e-14);
}

TEST(ExpA, ZeroAndAdditivity) {
  const Signature sig(5, 3);
  const std::vector<double> zero(3, 0.0);
  EXPECT_LT(max_diff(iwo::exp_a(sig, zero).mat, RMatrix::identity(8)), 1e-15);
  const std::vector<double> c1{0.3, -1.2, 0.7};
  const std::vector<double> c2{-0.1, 0.4, 1.5};
  const std::vector<double> sum{0.2, -0.8, 2.2};
  EXPECT_LT(max_diff(iwo::exp_a(sig, c1).mat * iwo::exp_a(sig, c2).mat, iwo::exp_a(sig, sum).mat), 1e-12);
  const std::vector<double> short_c{1.0};
  EXPECT_THROW(iwo::exp_a(sig, short_c), iwo::ShapeError);
}

TEST(ExpA, ScalesNullVectors) {
  const Signature sig(3, 2);
  const std::vector<int> k{2, -1};
  const auto g = iwo::exp_a_log2(sig, k);
  // H w_i = -c_i w_i, so exp(H) w_i = e^{-c_i} w_i.
  EXPECT_EQ(g.apply(iwo::null_vector(sig, 1)), Rational(1, 4) * iwo::null_vector(sig, 1));
  EXPECT_EQ(g.apply(iwo::null_vector(sig, 2)), Rational(2) * iwo::null_vector(sig, 2));
}

TEST(K0Rotation, IsInOpqAndRequiresK0Plane) {
  const Signature sig(5, 2);
  const auto g = iwo::k0_rotation(sig, 1, 3, Rational(3, 5), Rational(4, 5));
  EXPECT_TRUE(iwo::is_in_opq(g.mat, sig));
  EXPECT_THROW(iwo::k0_rotation(sig, 1, 4, Rational(3, 5), Rational(4, 5)), iwo::DomainError);
  EXPECT_THROW(iwo::k0_rotation(sig, 1, 2, Rational(1), Rational(1)), iwo::DomainError);
}

TEST(ExpGeneric, AgreesWithClosedForms) {
  const Signature sig(4, 2);
  EXPECT_LT(max_diff(iwo::exp_generic(iwo::detail::boost(sig, 3, 5), 0.0).element.mat, RMatrix::identity(6)), 1e-15);

  const auto n = iwo::build_n(sig);
  oracle::Gen gen(4);
  for (int trial = 0; trial < 10; ++trial) {
    QMatrix m(6, 6);
    for (const auto& b : n.elements) m += gen.rational(3) * b.matrix();
    const LieElement x(sig, m);
    const Rational t(static_cast<long>(gen.integer(-30, 30)), 10);
    const auto exact = iwo::exp_nilpotent(LieElement(sig, t * m));
    const auto numeric = iwo::exp_generic(x, t.to_double());
    ASSERT_LT(max_diff(numeric.element.mat, iwo::to_double(exact.mat)), 1e-10);
  }

  const std::vector<Rational> c{Rational(1, 2), Rational(-3, 4)};
  const auto h = iwo::a_element(sig, c);
  const std::vector<double> cd{1.0, -1.5};
  EXPECT_LT(max_diff(iwo::exp_generic(h, 2.0).element.mat, iwo::exp_a(sig, cd).mat), 1e-10);
}

TEST(ExpGeneric, StaysInGroupForLargeElements) {
  const Signature sig(3, 2);
  oracle::Gen gen(21);
  const auto so = iwo::so_basis(sig);
  for (int trial = 0; trial < 10; ++trial) {
    QMatrix m(5, 5);
    for (const auto& b : so.elements) m += Rational(gen.integer(-3, 3)) * b.matrix();
    const auto r = iwo::exp_generic(LieElement(sig, m), 0.5);
    ASSERT_LT(r.residual, 1e-9);
  }
}

TEST(FlowCurve, StabilizerIsConstantAndAScalesNullVector) {
  const Signature sig(2, 1);
  const RVector axis = iwo::to_double(iwo::basis_vector(sig, 2) - iwo::basis_vector(sig, 3));
  const auto grid = iwo::default_t_grid();
  for (const auto& s : iwo::flow_curve(n21(), axis, grid)) ASSERT_LT(max_diff(s.point, axis), 1e-12);

  const std::vector<Rational> one{Rational(1)};
  const RVector w1 = iwo::to_double(iwo::null_vector(sig, 1));
  const std::vector<double> t1{1.0};
  const auto curve = iwo::flow_curve(iwo::a_element(sig, one), w1, t1);
  ASSERT_EQ(curve.size(), 1u);
  EXPECT_LT(max_diff(curve[0].point, std::exp(-1.0) * w1), 1e-12);
}

TEST(FlowCurve, PreservesTheForm) {
  const Signature sig(3, 2);
  const RVector e1 = iwo::to_double(iwo::basis_vector(sig, 1));
  QMatrix m(5, 5);
  for (const auto& b : iwo::so_basis(sig).elements) m += Rational(1, 10) * b.matrix();
  for (const auto& s : iwo::flow_curve(LieElement(sig, m), e1, iwo::default_t_grid())) ASSERT_LE(s.norm_residual, 1e-9) << s.t;
  EXPECT_THROW(iwo::flow_curve(LieElement(sig, m), RVector(4), iwo::default_t_grid()), iwo::ShapeError);
}

TEST(TGrid, Endpoints) {
  const auto g = iwo::t_grid(-1.0, 1.0, 11);
  ASSERT_EQ(g.size(), 11u);
  EXPECT_DOUBLE_EQ(g.front(), -1.0);
  EXPECT_DOUBLE_EQ(g.back(), 1.0);
  EXPECT_DOUBLE_EQ(g[5], 0.0);
  EXPECT_EQ(iwo::t_grid(2.0, 5.0, 1), std::vector<double>{2.0});
  EXPECT_THROW(iwo::t_grid(0.0, 1.0, 0), iwo::UsageError);
  EXPECT_EQ(iwo::default_t_grid().size(), 61u);
}
