#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <set>

#include "modcurve/curves.hpp"
#include "modcurve/galois.hpp"
#include "modcurve/lattice.hpp"

using namespace modcurve;

namespace {

// Classical genus of X_0(N) from psi, nu2, nu3 and the cusp count.
long x0_genus_oracle(long n) {
  std::vector<long> primes;
  for (long p = 2, m = n; m > 1; ++p) {
    if (m % p) continue;
    primes.push_back(p);
    while (m % p == 0) m /= p;
  }
  long psi = n;
  for (long p : primes) psi = psi / p * (p + 1);
  long nu2 = 0, nu3 = 0;
  if (n % 4 != 0) {
    nu2 = 1;
    for (long p : primes) nu2 *= p == 2 ? 1 : (p % 4 == 1 ? 2 : 0);
  }
  if (n % 9 != 0) {
    nu3 = 1;
    for (long p : primes) nu3 *= p == 3 ? 1 : (p % 3 == 1 ? 2 : 0);
  }
  auto phi = [](long m) {
    long count = 0;
    for (long a = 1; a <= m; ++a) count += std::gcd(a, m) == 1;
    return count;
  };
  long cusps = 0;
  for (long d = 1; d <= n; ++d)
    if (n % d == 0) cusps += phi(std::gcd(d, n / d));
  const long twelve_g = 12 + psi - 3 * nu2 - 4 * nu3 - 6 * cusps;
  EXPECT_EQ(twelve_g % 12, 0);
  return twelve_g / 12;
}

MatrixGroup g1() { return mod7_image("G1"); }

MatrixGroup pm_closure(std::initializer_list<ZMatrix> gens, Modulus n) {
  ElementList list(gens);
  list.push_back(ZMatrix::minus_identity(n));
  return closure(list, n);
}

}  // namespace

TEST(Components, Examples) {
  EXPECT_EQ(geometric_components(full_group(7)), 1u);
  EXPECT_EQ(geometric_components(plus_minus_identity(7)), 6u);
  EXPECT_EQ(geometric_components(pm_closure({ZMatrix(1, 2, 2, 5, 7)}, 7)), 6u);
}

TEST(Genus, Examples) {
  for (Modulus n : {1u, 2u, 7u, 12u}) EXPECT_EQ(genus(full_group(n)).genus, 0u);
  EXPECT_EQ(genus(plus_minus_identity(7)).genus, 3u);
  EXPECT_EQ(genus(borel(11)).genus, 1u);
  EXPECT_EQ(genus(borel(37)).genus, 2u);
  EXPECT_EQ(genus(borel(13)).genus, 0u);
}

TEST(Genus, X0MatchesClassicalFormula) {
  for (Modulus n = 1; n <= 50; ++n) {
    const auto inv = genus(borel(n));
    EXPECT_EQ(static_cast<long>(inv.genus), x0_genus_oracle(n)) << "N = " << n;
    EXPECT_EQ(inv.components, 1u);
  }
}

TEST(Genus, IntegralityIdentityOnStandardSubgroups) {
  for (Modulus n = 1; n <= 12; ++n) {
    for (const MatrixGroup& h : {full_group(n), special_linear_group(n), borel(n), borel1(n), borel1(n, true),
                                 plus_minus_identity(n), trivial_group(n)}) {
      const auto inv = genus(h);
      const long lhs = 12 * (static_cast<long>(inv.genus) - 1);
      const long rhs = static_cast<long>(inv.sl2_index) - 3 * static_cast<long>(inv.e2_count) -
                       4 * static_cast<long>(inv.e3_count) - 6 * static_cast<long>(inv.cusp_count);
      EXPECT_EQ(lhs, rhs) << "n = " << n;
    }
  }
}

TEST(Genus, IntegralityIdentityOnWholeLattices) {
  for (Modulus n : {2u, 3u, 4u, 5u, 6u, 7u, 8u}) {
    const auto lattice = enumerate_subgroups_containing_minus_I(n, {250000, 4});
    for (const auto& h : lattice.subgroups()) {
      const auto inv = genus(h);
      EXPECT_EQ(12 * (static_cast<long>(inv.genus) - 1),
                static_cast<long>(inv.sl2_index) - 3 * static_cast<long>(inv.e2_count) -
                    4 * static_cast<long>(inv.e3_count) - 6 * static_cast<long>(inv.cusp_count));
    }
  }
}

TEST(ClosedPoints, Examples) {
  const auto full = closed_points_over_j(full_group(7), g1());
  ASSERT_EQ(full.size(), 1u);
  EXPECT_EQ(full.front().degree, 1u);

  const auto x7 = closed_points_over_j(plus_minus_identity(7), g1());
  EXPECT_EQ(x7.size(), 56u);
  for (const auto& p : x7) EXPECT_EQ(p.degree, 18u);

  const auto rec = level78_image();
  std::set<std::size_t> degrees;
  for (const auto& p : closed_points_over_j(borel(26), image_at_level(rec, 26))) degrees.insert(p.degree);
  EXPECT_EQ(degrees, (std::set<std::size_t>{18, 24}));
}

TEST(ClosedPoints, DegreeDefinitionOnConjugates) {
  // [gGg^-1 : gGg^-1 ∩ (gAg^-1)H], evaluated literally with conjugated groups.
  const MatrixGroup g = g1();
  const MatrixGroup a = plus_minus_identity(7);
  for (const MatrixGroup& h : {borel(7), mod7_image("G6"), pm_closure({ZMatrix(1, 0, 2, 6, 7)}, 7)}) {
    for (const auto& p : closed_points_over_j(h, g, a, 1)) {
      const ZMatrix x = p.coset.representative;
      const MatrixGroup gg = conjugate_group(g, x);
      const ElementList ah = subset_product(conjugate_group(a, x).elements(), h.elements());
      const std::size_t meet = set_intersection(gg.elements(), ah).size();
      EXPECT_EQ(p.degree, gg.order() / meet);
    }
  }
}

TEST(ClosedPoints, RejectsAutomorphismGroupNotNormalizedByImage) {
  const MatrixGroup a = closure({ZMatrix(1, 1, 0, 1, 7), ZMatrix::minus_identity(7)}, 7);
  EXPECT_THROW(closed_points_over_j(borel(7), g1(), a, 1), InvalidAutomorphismGroup);
  EXPECT_THROW(closed_points_over_j(borel(7), full_group(5)), ModulusMismatch);
}

TEST(ClosedPoints, JFieldDegreeScales) {
  for (const auto& p : closed_points_over_j(borel(7), g1(), plus_minus_identity(7), 3)) EXPECT_EQ(p.degree % 3, 0u);
}

TEST(PointMaps, InclusionExamples) {
  const auto x7 = closed_points_over_j(plus_minus_identity(7), g1());
  for (const auto& p : x7) {
    const auto same = map_point_inclusion(p, p.subgroup);
    EXPECT_EQ(same.coset.representative, p.coset.representative);
    const auto top = map_point_inclusion(p, full_group(7));
    EXPECT_EQ(top.degree, 1u);
    EXPECT_EQ(top.coset.representative, full_group(7).elements().front());
  }
  const MatrixGroup h2 = pm_closure({ZMatrix(1, 0, 2, 6, 7)}, 7);
  // The degree-9 points of X_H2 are images of degree-18 points of X(7).
  std::set<ZMatrix, bool (*)(const ZMatrix&, const ZMatrix&)> hit([](const ZMatrix& x, const ZMatrix& y) {
    return x.encode() < y.encode();
  });
  for (const auto& p : x7) {
    const auto q = map_point_inclusion(p, h2);
    EXPECT_EQ(18u % q.degree, 0u);
    if (q.degree == 9) hit.insert(q.coset.representative);
  }
  std::size_t nine = 0;
  for (const auto& q : closed_points_over_j(h2, g1())) nine += q.degree == 9;
  EXPECT_EQ(nine, 6u);
  EXPECT_EQ(hit.size(), nine);
  EXPECT_THROW(map_point_inclusion(closed_points_over_j(borel(7), g1()).front(), mod7_image("G6")), NotSubgroup);
}

TEST(PointMaps, InclusionDegreeMonotonicity) {
  const auto lattice = enumerate_subgroups_containing_minus_I(7, {250000, 4});
  std::mt19937_64 rng(17);
  const auto& inclusions = lattice.maximal_inclusions();
  for (int trial = 0; trial < 150; ++trial) {
    const auto [sub, super] = inclusions[rng() % inclusions.size()];
    const MatrixGroup& h = lattice.subgroup(sub);
    const MatrixGroup& k = lattice.subgroup(super);
    const std::size_t d = inclusion_degree(h, k);
    for (const auto& p : closed_points_over_j(h, g1())) {
      const auto q = map_point_inclusion(p, k);
      // Residue degree of the image divides, and the relative degree is bounded by the map degree.
      ASSERT_EQ(p.degree % q.degree, 0u);
      EXPECT_LE(p.degree / q.degree, d);
    }
  }
}

TEST(PointMaps, ConjugationExamplesAndInvariance) {
  const auto points = closed_points_over_j(borel(7), g1());
  for (const auto& p : points) {
    EXPECT_EQ(map_point_conjugation(p, ZMatrix::identity(7)).coset.representative, p.coset.representative);
    const auto q = map_point_conjugation(p, ZMatrix::minus_identity(7));
    EXPECT_EQ(q.subgroup, p.subgroup);
    EXPECT_EQ(q.coset.representative, p.coset.representative);
  }
  const auto lattice = enumerate_subgroups_containing_minus_I(7, {250000, 4});
  std::mt19937_64 rng(99);
  const MatrixGroup full = full_group(7);
  const auto& all = full.elements();
  for (int trial = 0; trial < 120; ++trial) {
    const MatrixGroup& h = lattice.subgroup(rng() % lattice.size());
    const ZMatrix x = all[rng() % all.size()];
    const auto before = genus(h);
    const auto after = genus(conjugate_group(h, x));
    EXPECT_EQ(before.genus, after.genus);
    EXPECT_EQ(before.components, after.components);
    for (const auto& p : closed_points_over_j(h, g1())) {
      const auto q = map_point_conjugation(p, x);
      EXPECT_EQ(q.degree, p.degree);
      EXPECT_EQ(q.subgroup, conjugate_group(h, x));
    }
  }
}

TEST(PointMaps, InclusionDegreeExamples) {
  EXPECT_EQ(inclusion_degree(borel(7), borel(7)), 1u);
  EXPECT_EQ(inclusion_degree(plus_minus_identity(7), full_group(7)), 1008u);
  EXPECT_EQ(inclusion_degree(borel(7), full_group(7)), 8u);
  // Without -I the degree is computed on ±H.
  EXPECT_EQ(inclusion_degree(borel1(7), borel(7)), 3u);
  EXPECT_THROW(inclusion_degree(full_group(7), borel(7)), NotSubgroup);
}
