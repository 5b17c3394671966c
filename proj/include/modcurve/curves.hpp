#pragma once

// Invariants of X_H and the closed points of X_H above a fixed j-invariant.
//
// Closed points over j(E) correspond to double cosets H g G, where G is the
// extended mod-n Galois image. The point attached to H g G has degree
//   [Q(j):Q] * [gGg^-1 : gGg^-1 ∩ (gAg^-1) H],
// with A the image of Aut(E) (= {±I} away from j = 0, 1728).

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "modcurve/error.hpp"
#include "modcurve/group.hpp"
#include "modcurve/zmatrix.hpp"

namespace modcurve {

inline std::size_t euler_phi(Modulus n) {
  std::size_t count = 0;
  for (Modulus a = 0; a < n; ++a)
    if (is_unit(a, n)) ++count;
  return count;
}

// [(Z/n)* : det H]
inline std::size_t geometric_components(const MatrixGroup& h) {
  std::vector<std::uint32_t> dets;
  for (const auto& m : h.elements()) dets.push_back(m.det_value());
  std::sort(dets.begin(), dets.end());
  dets.erase(std::unique(dets.begin(), dets.end()), dets.end());
  return euler_phi(h.modulus()) / dets.size();
}

struct CurveInvariants {
  Modulus level = 1;
  MatrixGroup subgroup;
  std::size_t components = 1;
  std::size_t genus = 0;
  std::size_t sl2_index = 1;  // [SL2(Z/n) : ±(H ∩ SL2(Z/n))]
  std::size_t cusp_count = 0;
  std::size_t e2_count = 0;
  std::size_t e3_count = 0;
};

// Genus of a geometric component of X_H via the coset action of SL2(Z/n) on
// ±(H ∩ SL2)\SL2: elliptic points of order 2 and 3 are cosets fixed by
// (0 -1; 1 0) and (0 -1; 1 -1), cusps are orbits of (1 1; 0 1).
inline CurveInvariants genus(const MatrixGroup& h) {
  const Modulus n = h.modulus();
  CurveInvariants inv;
  inv.level = n;
  inv.subgroup = h;
  inv.components = geometric_components(h);

  const MatrixGroup hs = plus_minus(intersect_sl2(h));
  const std::uint32_t one = n == 1 ? 0 : 1;
  std::vector<MatrixCode> sl;  // SL2(Z/n) codes, increasing
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = 0; b < n; ++b)
      for (std::uint32_t c = 0; c < n; ++c)
        for (std::uint32_t d = 0; d < n; ++d) {
          const std::uint64_t det = (std::uint64_t{a} * d + std::uint64_t{n} * n - std::uint64_t{b} * c) % n;
          if (det == one) sl.push_back(ZMatrix::from_reduced(a, b, c, d, n).encode());
        }
  auto position = [&](const ZMatrix& m) {
    return static_cast<std::size_t>(std::lower_bound(sl.begin(), sl.end(), m.encode()) - sl.begin());
  };

  constexpr std::uint32_t kUnset = ~std::uint32_t{0};
  std::vector<std::uint32_t> coset(sl.size(), kUnset);
  std::vector<ZMatrix> reps;
  for (std::size_t i = 0; i < sl.size(); ++i) {
    if (coset[i] != kUnset) continue;
    const ZMatrix x = ZMatrix::decode(sl[i], n);
    const auto id = static_cast<std::uint32_t>(reps.size());
    for (const auto& y : hs.elements()) coset[position(mul_unchecked(y, x))] = id;
    reps.push_back(x);
  }
  const std::size_t mu = reps.size();
  inv.sl2_index = mu;

  const ZMatrix s2(0, -1, 1, 0, n);
  const ZMatrix s3(0, -1, 1, -1, n);
  const ZMatrix t(1, 1, 0, 1, n);
  std::vector<std::uint32_t> t_perm(mu);
  for (std::size_t c = 0; c < mu; ++c) {
    if (coset[position(mul_unchecked(reps[c], s2))] == c) ++inv.e2_count;
    if (coset[position(mul_unchecked(reps[c], s3))] == c) ++inv.e3_count;
    t_perm[c] = coset[position(mul_unchecked(reps[c], t))];
  }
  std::vector<bool> visited(mu, false);
  for (std::size_t c = 0; c < mu; ++c) {
    if (visited[c]) continue;
    ++inv.cusp_count;
    for (std::size_t x = c; !visited[x]; x = t_perm[x]) visited[x] = true;
  }

  // 12(g - 1) = mu - 3 e2 - 4 e3 - 6 cusps
  const auto twelve_g_minus_12 = static_cast<std::int64_t>(mu) - 3 * static_cast<std::int64_t>(inv.e2_count) -
                                 4 * static_cast<std::int64_t>(inv.e3_count) -
                                 6 * static_cast<std::int64_t>(inv.cusp_count);
  if (twelve_g_minus_12 % 12 != 0 || twelve_g_minus_12 < -12) {
    throw std::logic_error("genus formula produced a non-integral or negative genus");
  }
  inv.genus = static_cast<std::size_t>(twelve_g_minus_12 / 12 + 1);
  return inv;
}

// Checks that A is normalized by G; throws InvalidAutomorphismGroup otherwise.
inline void check_automorphism_group(const MatrixGroup& g, const MatrixGroup& a) {
  check_same_modulus(g, a);
  for (const auto& x : g.generators()) {
    if (!normalizes(x, a)) throw InvalidAutomorphismGroup("A is not normalized by the Galois image");
  }
}

// [gGg^-1 : gGg^-1 ∩ (gAg^-1)H] * j_field_degree, computed on G itself:
// y in G is counted when a y in g^-1 H g for some a in A.
inline std::size_t point_degree(const MatrixGroup& h, const MatrixGroup& g_image, const MatrixGroup& a,
                                const ZMatrix& g, std::size_t j_field_degree = 1) {
  const ZMatrix g_inv = mat_inv(g);
  std::size_t stabilizer = 0;
  for (const auto& y : g_image.elements()) {
    for (const auto& x : a.elements()) {
      if (h.contains(mul_unchecked(mul_unchecked(g, mul_unchecked(x, y)), g_inv))) {
        ++stabilizer;
        break;
      }
    }
  }
  if (stabilizer == 0 || g_image.order() % stabilizer != 0) {
    throw std::logic_error("point degree: stabilizer is not a subgroup");
  }
  return j_field_degree * (g_image.order() / stabilizer);
}

struct ClosedPointClass {
  Modulus level = 1;
  MatrixGroup subgroup;        // H
  MatrixGroup galois_image;    // G
  MatrixGroup automorphisms;   // A
  DoubleCoset coset;           // H g G with canonical representative
  std::size_t degree = 1;
  std::size_t j_field_degree = 1;
};

inline std::vector<ClosedPointClass> closed_points_over_j(const MatrixGroup& h, const MatrixGroup& g_image,
                                                          const MatrixGroup& a, std::size_t j_field_degree = 1) {
  check_same_modulus(h, g_image);
  check_automorphism_group(g_image, a);
  std::vector<ClosedPointClass> points;
  for (const auto& coset : double_cosets(h, g_image)) {
    ClosedPointClass p;
    p.level = h.modulus();
    p.subgroup = h;
    p.galois_image = g_image;
    p.automorphisms = a;
    p.coset = coset;
    p.degree = point_degree(h, g_image, a, coset.representative, j_field_degree);
    p.j_field_degree = j_field_degree;
    points.push_back(std::move(p));
  }
  return points;
}

// Convenience overload for the non-CM case A = {±I}.
inline std::vector<ClosedPointClass> closed_points_over_j(const MatrixGroup& h, const MatrixGroup& g_image) {
  return closed_points_over_j(h, g_image, plus_minus_identity(h.modulus()), 1);
}

namespace detail {

inline ClosedPointClass point_with_rep(const MatrixGroup& h, const ClosedPointClass& source, const ZMatrix& g) {
  const auto part = double_coset_partition(h, source.galois_image);
  const DoubleCoset& coset = part.cosets[part.coset_of(g)];
  ClosedPointClass p = source;
  p.subgroup = h;
  p.coset = coset;
  p.degree = point_degree(h, source.galois_image, source.automorphisms, coset.representative, source.j_field_degree);
  return p;
}

}  // namespace detail

// [±H' : ±H]
inline std::size_t inclusion_degree(const MatrixGroup& h, const MatrixGroup& h_prime) {
  check_same_modulus(h, h_prime);
  if (!h.is_subgroup_of(h_prime)) throw NotSubgroup("inclusion_degree: H is not contained in H'");
  return plus_minus(h_prime).order() / plus_minus(h).order();
}

// Image of p under the inclusion morphism X_H -> X_H'.
inline ClosedPointClass map_point_inclusion(const ClosedPointClass& p, const MatrixGroup& h_prime) {
  check_same_modulus(p.subgroup, h_prime);
  if (!p.subgroup.is_subgroup_of(h_prime)) throw NotSubgroup("map_point_inclusion: H is not contained in H'");
  return detail::point_with_rep(h_prime, p, p.coset.representative);
}

// Image of p under the conjugation isomorphism X_H -> X_{hHh^-1}.
inline ClosedPointClass map_point_conjugation(const ClosedPointClass& p, const ZMatrix& h) {
  return detail::point_with_rep(conjugate_group(p.subgroup, h), p, h * p.coset.representative);
}

}  // namespace modcurve
