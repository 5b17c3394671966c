#include <gtest/gtest.h>

#include <random>
#include <set>

#include "modcurve/galois.hpp"
#include "modcurve/group.hpp"

using namespace modcurve;

namespace {

MatrixGroup g1() { return closure({ZMatrix(2, 0, 0, 4, 7), ZMatrix(0, 2, 1, 0, 7), ZMatrix::minus_identity(7)}, 7); }

// Plain set closure with std::set; independent of MatrixGroup internals.
std::set<MatrixCode> bfs_closure(const std::vector<ZMatrix>& gens, Modulus n) {
  std::set<MatrixCode> seen{ZMatrix::identity(n).encode()};
  std::vector<ZMatrix> queue{ZMatrix::identity(n)};
  while (!queue.empty()) {
    const ZMatrix x = queue.back();
    queue.pop_back();
    for (const auto& g : gens) {
      const ZMatrix y = x * g;
      if (seen.insert(y.encode()).second) queue.push_back(y);
    }
  }
  return seen;
}

std::set<MatrixCode> codes_of(const ElementList& list) {
  std::set<MatrixCode> out;
  for (const auto& m : list) out.insert(m.encode());
  return out;
}

bool is_group(const ElementList& list) {
  const auto codes = codes_of(list);
  if (list.empty()) return false;
  for (const auto& x : list) {
    if (!codes.count(mat_inv(x).encode())) return false;
    for (const auto& y : list)
      if (!codes.count((x * y).encode())) return false;
  }
  return true;
}

ElementList random_subset(std::mt19937_64& rng, const ElementList& pool, std::size_t size) {
  ElementList out;
  std::sample(pool.begin(), pool.end(), std::back_inserter(out), size, rng);
  canonicalize(out);
  return out;
}

}  // namespace

TEST(Closure, Examples) {
  EXPECT_EQ(closure({ZMatrix::minus_identity(7)}, 7).order(), 2u);
  const MatrixGroup g = g1();
  EXPECT_EQ(g.order(), 36u);
  EXPECT_EQ(codes_of(g.elements()), bfs_closure(g.generators(), 7));
  EXPECT_EQ(closure({ZMatrix(3, 0, 0, 1, 7), ZMatrix(1, 1, 0, 1, 7), ZMatrix(0, 1, 1, 0, 7)}, 7).order(), 2016u);
  EXPECT_THROW(closure({ZMatrix(2, 0, 0, 2, 4)}, 4), NotInvertible);
  EXPECT_THROW(closure({ZMatrix::identity(5)}, 7), ModulusMismatch);
}

TEST(Closure, IdempotentAndSorted) {
  const MatrixGroup g = g1();
  EXPECT_EQ(closure(g.elements(), 7), g);
  EXPECT_TRUE(std::is_sorted(g.codes().begin(), g.codes().end()));
  EXPECT_TRUE(is_group(g.elements()));
  EXPECT_EQ(closure(g.generators(), 7), g);
}

TEST(Normalizer, Examples) {
  EXPECT_EQ(normalizer(full_group(7)).order(), 2016u);
  EXPECT_EQ(normalizer(plus_minus_identity(7)).order(), 2016u);
  EXPECT_EQ(normalizer(borel(7)), borel(7));
  const MatrixGroup n = normalizer(g1());
  EXPECT_TRUE(g1().is_subgroup_of(n));
  // Exhaustive definition: g H g^-1 = H as sets.
  std::size_t count = 0;
  for_each_gl2(7, [&](const ZMatrix& g) {
    if (conjugate_group(g1(), g) == g1()) ++count;
  });
  EXPECT_EQ(n.order(), count);
}

TEST(DoubleCosets, Examples) {
  EXPECT_EQ(double_cosets(full_group(7), g1()).size(), 1u);
  const auto cosets = double_cosets(plus_minus_identity(7), g1());
  EXPECT_EQ(cosets.size(), 56u);
  for (const auto& c : cosets) EXPECT_EQ(c.size, 36u);
  EXPECT_THROW(double_cosets(full_group(7), full_group(5)), ModulusMismatch);
}

TEST(DoubleCosets, PartitionWithMinimalRepresentatives) {
  const MatrixGroup g = g1();
  for (const MatrixGroup& h : {borel(7), borel1(7, true), mod7_image("G6"), plus_minus_identity(7)}) {
    const auto part = double_coset_partition(h, g);
    std::uint64_t total = 0;
    for (const auto& c : part.cosets) total += c.size;
    EXPECT_EQ(total, 2016u);
    // Each coset, tagged independently, has its representative as least element.
    for (std::size_t k = 0; k < part.cosets.size(); ++k) {
      std::set<MatrixCode> members;
      for (const auto& x : h.elements())
        for (const auto& y : g.elements()) members.insert((x * part.cosets[k].representative * y).encode());
      EXPECT_EQ(members.size(), part.cosets[k].size);
      EXPECT_EQ(*members.begin(), part.cosets[k].representative.encode());
      for (MatrixCode code : members) EXPECT_EQ(part.coset_of(ZMatrix::decode(code, 7)), k);
    }
  }
}

TEST(SubsetProduct, Examples) {
  const ElementList s = borel(7).elements();
  EXPECT_EQ(subset_product(s, {ZMatrix::identity(7)}), s);
  EXPECT_EQ(subset_product(plus_minus_identity(7).elements(), s), s);
}

TEST(SubsetProduct, ModularLawOnRandomSubsets) {
  std::mt19937_64 rng(2024);
  const ElementList pool = full_group(4).elements();
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const ElementList u = random_subset(rng, pool, 1 + rng() % 3);
    const MatrixGroup gen_u = closure(u, 4);
    // S a union of right cosets of <U>: S = <U> X for random X.
    const ElementList s = subset_product(gen_u.elements(), random_subset(rng, pool, 1 + rng() % 6));
    const ElementList t = random_subset(rng, pool, 1 + rng() % 40);
    EXPECT_EQ(subset_product(u, set_intersection(s, t)), set_intersection(s, subset_product(u, t)));
    ++checked;
  }
  EXPECT_EQ(checked, 300);
}

TEST(SubsetProduct, ProductMeetNormalizerIsSubgroup) {
  std::mt19937_64 rng(5);
  const ElementList pool = full_group(4).elements();
  for (int trial = 0; trial < 60; ++trial) {
    const MatrixGroup h = closure(random_subset(rng, pool, 1 + rng() % 2), 4);
    const MatrixGroup k = closure(random_subset(rng, pool, 1 + rng() % 2), 4);
    const MatrixGroup nh = normalizer(h);
    const MatrixGroup g = closure(random_subset(rng, nh.elements(), 1 + rng() % 2), 4);
    const ElementList meet = set_intersection(g.elements(), subset_product(h.elements(), k.elements()));
    EXPECT_TRUE(is_group(meet));
  }
}

TEST(SubsetProduct, ProductPreservesIndex) {
  std::mt19937_64 rng(9);
  const ElementList pool = full_group(4).elements();
  int applicable = 0;
  for (int trial = 0; trial < 400 && applicable < 40; ++trial) {
    const MatrixGroup g = closure(random_subset(rng, pool, 1 + rng() % 2), 4);
    const MatrixGroup h = closure(random_subset(rng, g.elements(), 1), 4);
    const MatrixGroup n = closure(random_subset(rng, pool, 1 + rng() % 2), 4);
    const ElementList gn = subset_product(g.elements(), n.elements());
    const ElementList hn = subset_product(h.elements(), n.elements());
    if (gn != subset_product(n.elements(), g.elements()) || hn != subset_product(n.elements(), h.elements())) continue;
    if (intersect(g, n) != intersect(h, n)) continue;
    ++applicable;
    EXPECT_EQ(index(g, h), gn.size() / hn.size());
  }
  EXPECT_GE(applicable, 10);
}

TEST(Index, Examples) {
  EXPECT_EQ(index(g1(), g1()), 1u);
  EXPECT_EQ(index(full_group(7), borel(7)), 8u);
  EXPECT_EQ(index(full_group(7), plus_minus_identity(7)), 1008u);
  EXPECT_THROW(index(borel(7), g1()), NotSubgroup);
}

TEST(Index, SurjectivityPreservesIndex) {
  // Reduction GL2(Z/12) -> GL2(Z/m) and preimages of subgroups K.
  for (Modulus m : {2u, 3u, 4u, 6u}) {
    const MatrixGroup big = full_group(12);
    for (const MatrixGroup& k : {borel(m), plus_minus_identity(m), special_linear_group(m), borel1(m, true)}) {
      const MatrixGroup pre =
          group_from_predicate(12, [&](const ZMatrix& x) { return k.contains(mat_reduce(x, m)); });
      EXPECT_EQ(index(big, pre), index(full_group(m), k)) << "m = " << m;
    }
  }
}

TEST(IntersectSl2, Examples) {
  EXPECT_EQ(intersect_sl2(full_group(7)).order(), 336u);
  EXPECT_EQ(intersect_sl2(plus_minus_identity(7)), plus_minus_identity(7));
  const MatrixGroup b = intersect_sl2(borel(7));
  EXPECT_EQ(b.order(), 42u);
  for (const auto& m : b.elements()) EXPECT_TRUE(m.c() == 0 && m.det_value() == 1);
}

TEST(KernelProduct, Examples) {
  EXPECT_TRUE(kernel_product_check(4, 6, 12));
  EXPECT_TRUE(kernel_product_check(6, 6, 6));
  EXPECT_TRUE(kernel_product_check(2, 3, 6));
  EXPECT_EQ(reduction_kernel(6, 1).size(), gl2_order(6));
  EXPECT_THROW(kernel_product_check(5, 6, 12), NotDivisor);
}

TEST(KernelProduct, ExhaustiveUpToTwelve) {
  for (Modulus level = 1; level <= 12; ++level)
    for (Modulus n = 1; n <= level; ++n)
      for (Modulus m = 1; m <= level; ++m)
        if (level % n == 0 && level % m == 0) {
          EXPECT_TRUE(kernel_product_check(n, m, level)) << n << " " << m << " " << level;
        }
}

TEST(Borel, OrdersAndReduction) {
  EXPECT_EQ(borel(2).order(), 2u);
  EXPECT_EQ(borel(7).order(), 252u);
  EXPECT_EQ(borel(1).order(), 1u);
  EXPECT_EQ(borel1(7).order(), 42u);
  EXPECT_EQ(borel1(7, true).order(), 84u);
  for (Modulus n : {4u, 6u, 12u, 26u})
    for (Modulus d = 1; d <= n; ++d)
      if (n % d == 0) {
        EXPECT_EQ(reduce_group(borel(n), d), borel(d)) << n << " -> " << d;
      }
}

TEST(Conjugation, PreservesOrderAndRoundTrips) {
  std::mt19937_64 rng(1);
  const ElementList pool = full_group(7).elements();
  for (int i = 0; i < 50; ++i) {
    const ZMatrix g = pool[rng() % pool.size()];
    const MatrixGroup c = conjugate_group(g1(), g);
    EXPECT_EQ(c.order(), 36u);
    EXPECT_TRUE(is_group(c.elements()));
    EXPECT_EQ(conjugate_group(c, mat_inv(g)), g1());
  }
}
