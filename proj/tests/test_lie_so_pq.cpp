#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <vector>

#include "iwo/lie_so_pq.hpp"
#include "oracles.hpp"

using iwo::LieElement;
using iwo::QMatrix;
using iwo::QVector;
using iwo::Rational;
using iwo::Signature;

namespace {

const std::vector<std::pair<int, int>> kSignatures = {{2, 1}, {3, 1}, {3, 2}, {2, 2}, {4, 2}, {4, 3}, {3, 3}, {5, 2}, {5, 3}, {4, 4}};

/// Writes value at the 1-based (r, c) entry and the so(p,q)-forced partner.
void put(QMatrix& m, int p, int r, int c, const Rational& value) {
  const auto i = static_cast<std::size_t>(r - 1);
  const auto j = static_cast<std::size_t>(c - 1);
  m(i, j) = value;
  const bool same_block = (r <= p) == (c <= p);
  m(j, i) = same_block ? -value : value;
}

// Hand-written root vectors, one per root-space dimension.
//   f_i - f_j: A_{p+1-j,p+1-i} = B_{p+1-j,i} = B_{p+1-i,j} = -D_{ij}
//   f_i + f_j: A_{p+1-j,p+1-i} = B_{p+1-j,i} = -B_{p+1-i,j} = D_{ij}
//   f_l:       A_{k,p-l+1} = B_{k,l}, k = 1..p-q
QMatrix difference_pattern(const Signature& sig, int i, int j) {
  const int p = sig.p();
  QMatrix m(sig.dim(), sig.dim());
  put(m, p, p + 1 - j, p + 1 - i, 1);
  put(m, p, p + 1 - j, p + i, 1);
  put(m, p, p + 1 - i, p + j, 1);
  put(m, p, p + i, p + j, -1);
  return m;
}

QMatrix sum_pattern(const Signature& sig, int i, int j) {
  const int p = sig.p();
  QMatrix m(sig.dim(), sig.dim());
  put(m, p, p + 1 - j, p + 1 - i, 1);
  put(m, p, p + 1 - j, p + i, 1);
  put(m, p, p + 1 - i, p + j, -1);
  put(m, p, p + i, p + j, 1);
  return m;
}

QMatrix single_pattern(const Signature& sig, int l, int k) {
  const int p = sig.p();
  QMatrix m(sig.dim(), sig.dim());
  put(m, p, k, p - l + 1, 1);
  put(m, p, k, p + l, 1);
  return m;
}

std::vector<QVector> flat(const std::vector<QMatrix>& ms) {
  std::vector<QVector> out;
  for (const auto& m : ms) out.push_back(m.flatten());
  return out;
}

std::vector<QVector> flat(const iwo::SubalgebraBasis& b) {
  std::vector<QVector> out;
  for (const auto& e : b.elements) out.push_back(e.matrix().flatten());
  return out;
}

}  // namespace

TEST(LieElement, RejectsNonSoMatrices) {
  const Signature sig(2, 1);
  EXPECT_THROW(LieElement(sig, QMatrix::identity(3)), iwo::DomainError);
  EXPECT_THROW(LieElement(sig, QMatrix(2, 2)), iwo::ShapeError);
  QMatrix boost(3, 3);
  boost(0, 2) = boost(2, 0) = Rational(1);
  EXPECT_NO_THROW(LieElement(sig, boost));
  QMatrix bad = boost;
  bad(2, 0) = Rational(-1);
  EXPECT_THROW(LieElement(sig, bad), iwo::DomainError);
}

TEST(LieElement, BlockAccessors) {
  const Signature sig(3, 2);
  const LieElement x(sig, single_pattern(sig, 2, 1));
  EXPECT_EQ(x.A(1, 2), Rational(1));
  EXPECT_EQ(x.B(1, 2), Rational(1));
  EXPECT_EQ(x.D(1, 2), Rational(0));
}

TEST(Structure, DimensionsAcrossSignatures) {
  for (auto [p, q] : kSignatures) {
    const Signature sig(p, q);
    const iwo::IwasawaData d(sig);
    const auto cartan = iwo::cartan_decompose(sig);
    const auto up = static_cast<std::size_t>(p);
    const auto uq = static_cast<std::size_t>(q);
    EXPECT_EQ(d.so.size(), (up + uq) * (up + uq - 1) / 2) << sig.str();
    EXPECT_EQ(cartan.k.size() + cartan.p_cartan.size(), d.so.size());
    EXPECT_EQ(cartan.p_cartan.size(), up * uq);
    EXPECT_EQ(d.a.size(), uq);
    EXPECT_EQ(d.k0.size(), (up - uq) * (up - uq - 1) / 2);
    EXPECT_EQ(d.n.size(), uq * (up - 1)) << sig.str();
    EXPECT_EQ(iwo::centralizer_of_a_dim(sig), d.k0.size() + uq);
  }
}

TEST(Cartan, InvolutionSplitsSo) {
  const Signature sig(3, 2);
  const auto cartan = iwo::cartan_decompose(sig);
  for (const auto& x : cartan.k.elements) EXPECT_EQ(iwo::cartan_involution(x), x);
  for (const auto& x : cartan.p_cartan.elements) EXPECT_EQ(iwo::cartan_involution(x), Rational(-1) * x);
  EXPECT_TRUE(iwo::is_bracket_closed(cartan.k));
}

TEST(AElements, AbelianAndMaximalInP) {
  for (auto [p, q] : kSignatures) {
    const Signature sig(p, q);
    const auto a = iwo::build_a(sig);
    const auto pp = iwo::cartan_decompose(sig).p_cartan;
    for (const auto& h : a.elements) {
      EXPECT_EQ(iwo::cartan_involution(h), Rational(-1) * h);
      for (const auto& g : a.elements) EXPECT_TRUE(bracket(h, g).matrix().is_zero());
    }
    // Y in p commuting with every H is in a. Brute force over p-coordinates.
    const std::size_t n2 = sig.dim() * sig.dim();
    QMatrix system(n2 * a.size(), pp.size());
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t k = 0; k < pp.size(); ++k) {
        const QMatrix c = iwo::commutator(a.elements[i].matrix(), pp.elements[k].matrix());
        for (std::size_t e = 0; e < n2; ++e) system(i * n2 + e, k) = c.entries()[e];
      }
    EXPECT_EQ(pp.size() - oracle::ModularRank::rank(system), static_cast<std::size_t>(q)) << sig.str();
  }
}

TEST(AElements, PlacementOfParameters) {
  const Signature sig(3, 2);
  const std::vector<Rational> c{Rational(2), Rational(5)};
  const auto h = iwo::a_element(sig, c);
  EXPECT_EQ(h.B(3, 1), Rational(2));  // B_{p-i+1, i}, i = 1
  EXPECT_EQ(h.B(2, 2), Rational(5));  // i = 2
  EXPECT_EQ(h.apply(iwo::null_vector(sig, 1)), Rational(-2) * iwo::null_vector(sig, 1));
  EXPECT_EQ(h.apply(iwo::null_vector(sig, 2)), Rational(-5) * iwo::null_vector(sig, 2));
}

TEST(Roots, MatchHandWrittenPatterns) {
  for (auto [p, q] : kSignatures) {
    const Signature sig(p, q);
    std::size_t checked = 0;
    for (const auto& root : iwo::restricted_roots(sig)) {
      if (!root.positive) continue;
      std::vector<QMatrix> expected;
      switch (root.kind) {
        case iwo::RootKind::difference: expected.push_back(difference_pattern(sig, root.i, root.j)); break;
        case iwo::RootKind::sum: expected.push_back(sum_pattern(sig, root.i, root.j)); break;
        case iwo::RootKind::single:
          for (int k = 1; k <= p - q; ++k) expected.push_back(single_pattern(sig, root.i, k));
          break;
      }
      for (const auto& m : expected) ASSERT_TRUE(LieElement::is_in_so(m, sig)) << m;
      EXPECT_TRUE(iwo::same_span(flat(expected), flat(root.space), sig.dim() * sig.dim())) << sig.str() << " " << root.label();
      ++checked;
    }
    EXPECT_EQ(checked, static_cast<std::size_t>(q * (q - 1) + (p == q ? 0 : q)));
  }
}

TEST(Roots, MultiplicitiesAndAbsentSingleRootsWhenPEqualsQ) {
  for (auto [p, q] : kSignatures) {
    const Signature sig(p, q);
    std::size_t singles = 0;
    for (const auto& root : iwo::restricted_roots(sig)) {
      EXPECT_EQ(root.multiplicity, root.kind == iwo::RootKind::single ? static_cast<std::size_t>(p - q) : 1u);
      singles += root.kind == iwo::RootKind::single ? 1 : 0;
    }
    EXPECT_EQ(singles, p == q ? 0u : static_cast<std::size_t>(2 * q));
  }
  const Signature sig(2, 2);
  const std::vector<int> f1{1, 0};
  EXPECT_TRUE(iwo::root_space(sig, f1).empty());
  const std::vector<int> two_f1{2, 0};
  EXPECT_TRUE(iwo::root_space(Signature(3, 2), two_f1).empty());
}

// Property: [g_alpha, g_beta] lies in g_{alpha+beta} (zero when that is not a root or 0).
TEST(RootsProperty, BracketsAddRoots) {
  oracle::Gen gen(8);
  for (auto [p, q] : {std::pair{3, 2}, {4, 3}, {3, 3}, {5, 2}}) {
    const Signature sig(p, q);
    const auto roots = iwo::restricted_roots(sig);
    std::map<std::vector<int>, const iwo::RootDatum*> by_coeffs;
    for (const auto& r : roots) by_coeffs[r.coeffs] = &r;
    const auto g0 = iwo::centralizer_of_a_dim(sig);
    for (const auto& a : roots) {
      for (const auto& b : roots) {
        std::vector<int> sum(a.coeffs);
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += b.coeffs[i];
        const LieElement x = gen.rational(3) * a.space.elements.front();
        const LieElement y = gen.rational(3) * b.space.elements.back();
        const LieElement z = bracket(x, y);
        const bool is_zero_root = std::all_of(sum.begin(), sum.end(), [](int c) { return c == 0; });
        if (is_zero_root) {
          // g_0: commutes with a.
          for (const auto& h : iwo::build_a(sig).elements) ASSERT_TRUE(bracket(h, z).matrix().is_zero());
          continue;
        }
        const auto it = by_coeffs.find(sum);
        if (it == by_coeffs.end()) {
          ASSERT_TRUE(z.matrix().is_zero()) << a.label() << " + " << b.label();
        } else {
          ASSERT_TRUE(it->second->space.contains(z)) << a.label() << " + " << b.label();
        }
      }
    }
    EXPECT_GT(g0, 0u);
  }
}

TEST(N, HandCheckedElementInTwoOne) {
  const Signature sig(2, 1);
  // X = E12 - E21 + E13 + E31.
  const QMatrix xm{{0, 1, 1}, {-1, 0, 0}, {1, 0, 0}};
  const LieElement x(sig, xm);
  const auto n = iwo::build_n(sig);
  EXPECT_TRUE(iwo::n_membership(x, n));
  const std::vector<Rational> c{Rational(1)};
  EXPECT_EQ(bracket(iwo::a_element(sig, c), x), Rational(-1) * x);
  const QMatrix x2 = xm * xm;
  EXPECT_EQ(x2, (QMatrix{{0, 0, 0}, {0, -1, -1}, {0, 1, 1}}));
  EXPECT_TRUE((x2 * xm).is_zero());
  const QMatrix adapted{{0, -1, 0}, {0, 0, 2}, {0, 0, 0}};
  EXPECT_EQ(iwo::in_adapted_basis(x), adapted);
}

TEST(N, NilpotentAndClosed) {
  for (auto [p, q] : kSignatures) {
    const Signature sig(p, q);
    const auto n = iwo::build_n(sig);
    EXPECT_TRUE(iwo::is_bracket_closed(n));
    for (const auto& x : n.elements) {
      QMatrix power = QMatrix::identity(sig.dim());
      for (std::size_t k = 0; k < sig.dim(); ++k) power = power * x.matrix();
      EXPECT_TRUE(power.is_zero());
    }
  }
}

// The equations alone leave (p-q)q + q(q-1) linear conditions on so(p,q);
// each involves two entries no other equation uses, so they are independent.
TEST(NEquations, SolutionSpaceDimensionByCounting) {
  for (auto [p, q] : kSignatures) {
    const Signature sig(p, q);
    const auto so_dim = static_cast<std::size_t>((p + q) * (p + q - 1) / 2);
    const auto conditions = static_cast<std::size_t>((p - q) * q + q * (q - 1));
    const auto space = iwo::n_equation_solution_space(sig);
    EXPECT_EQ(space.size(), so_dim - conditions) << sig.str();
    for (const auto& x : space.elements) EXPECT_TRUE(iwo::satisfies_n_equations(x));
    for (const auto& x : iwo::build_n(sig).elements) EXPECT_TRUE(iwo::satisfies_n_equations(x));
  }
  EXPECT_EQ(iwo::n_equation_solution_space(Signature(3, 2)).size(), 6u);
}

TEST(NMembershipProperty, AgreesWithSpanMembership) {
  oracle::Gen gen(42);
  for (auto [p, q] : {std::pair{2, 1}, {3, 2}, {4, 2}, {3, 3}}) {
    const Signature sig(p, q);
    const auto n = iwo::build_n(sig);
    const auto so = iwo::so_basis(sig);
    const auto eq = iwo::n_equation_solution_space(sig);
    for (int trial = 0; trial < 60; ++trial) {
      const auto& source = trial % 3 == 0 ? n : (trial % 3 == 1 ? so : eq);
      LieElement x = LieElement::zero(sig);
      for (const auto& e : source.elements) x = x + gen.rational(4) * e;
      ASSERT_EQ(iwo::n_membership(x, n), n.contains(x));
    }
  }
}

TEST(Subalgebras, BasisChecks) {
  const Signature sig(3, 1);
  const auto so = iwo::so_basis(sig);
  std::vector<LieElement> dependent{so.elements[0], so.elements[1], so.elements[0] + so.elements[1]};
  EXPECT_THROW(iwo::make_basis(sig, iwo::Subalgebra::custom, dependent), iwo::InvariantViolation);
  // Two rotations in so(3) do not close.
  std::vector<LieElement> open{so.elements[0], so.elements[1]};
  EXPECT_THROW(iwo::make_basis(sig, iwo::Subalgebra::custom, open), iwo::InvariantViolation);
  EXPECT_NO_THROW(iwo::make_basis(sig, iwo::Subalgebra::custom, open, iwo::BasisCheck::independence));
}

TEST(Subalgebras, GroupSelection) {
  const iwo::IwasawaData d(Signature(4, 2));
  EXPECT_EQ(iwo::group_subalgebra(d, iwo::GroupSelector::AN).size(), 2u + 6u);
  EXPECT_EQ(iwo::group_subalgebra(d, iwo::GroupSelector::K0AN).size(), 1u + 2u + 6u);
  EXPECT_THROW(iwo::group_subalgebra(d, iwo::GroupSelector::KprimeAN), iwo::UsageError);
  EXPECT_THROW(iwo::group_subalgebra(d, iwo::GroupSelector::AN, d.k0), iwo::UsageError);
  const iwo::SubalgebraBasis outside{d.sig, iwo::Subalgebra::custom, {d.n.elements.front()}};
  EXPECT_THROW(iwo::group_subalgebra(d, iwo::GroupSelector::KprimeAN, outside), iwo::DomainError);
  EXPECT_EQ(iwo::parse_group("K0AN"), iwo::GroupSelector::K0AN);
  EXPECT_FALSE(iwo::parse_group("XYZ").has_value());
}

TEST(AdaptedBasis, UpperTriangularNAndDiagonalA) {
  oracle::Gen gen(5);
  for (auto [p, q] : kSignatures) {
    const Signature sig(p, q);
    const std::size_t dim = sig.dim();
    const auto n = iwo::build_n(sig);
    LieElement x = LieElement::zero(sig);
    for (const auto& e : n.elements) x = x + gen.rational(5) * e;
    const QMatrix m = iwo::in_adapted_basis(x);
    for (std::size_t r = 0; r < dim; ++r)
      for (std::size_t c = 0; c <= r; ++c) ASSERT_TRUE(m(r, c).is_zero()) << sig.str() << m;
    std::vector<Rational> cs;
    for (int i = 0; i < q; ++i) cs.push_back(gen.rational(5));
    const QMatrix h = iwo::in_adapted_basis(iwo::a_element(sig, cs));
    for (std::size_t r = 0; r < dim; ++r)
      for (std::size_t c = 0; c < dim; ++c) {
        Rational expected(0);
        if (r == c && r < static_cast<std::size_t>(q)) expected = -cs[r];
        if (r == c && r >= static_cast<std::size_t>(p)) expected = cs[dim - 1 - r];
        ASSERT_EQ(h(r, c), expected) << sig.str();
      }
  }
}
