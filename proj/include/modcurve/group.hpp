#pragma once

// Finite subgroups of GL2(Z/n) represented by their canonically sorted
// element lists, together with the elementary operations on them: closure,
// conjugation, normalizers, indices, cosets and double cosets.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <numeric>
#include <unordered_set>
#include <vector>

#include "modcurve/error.hpp"
#include "modcurve/gl_index.hpp"
#include "modcurve/zmatrix.hpp"

namespace modcurve {

// Sorted, duplicate-free list of matrices sharing one modulus.
using ElementList = std::vector<ZMatrix>;

inline void canonicalize(ElementList& list) {
  std::sort(list.begin(), list.end());
  list.erase(std::unique(list.begin(), list.end()), list.end());
}

namespace detail {

// Membership set for codes of one modulus: a bitmap when n^4 is small,
// otherwise a hash set.
class CodeSet {
 public:
  explicit CodeSet(Modulus n) {
    const std::uint64_t space = std::uint64_t{n} * n * n * n;
    if (space <= (std::uint64_t{1} << 22)) bits_.assign((space + 63) / 64, 0);
  }

  // Returns true if the code was not present.
  bool insert(MatrixCode code) {
    if (!bits_.empty()) {
      std::uint64_t& word = bits_[code >> 6];
      const std::uint64_t mask = std::uint64_t{1} << (code & 63);
      if (word & mask) return false;
      word |= mask;
      return true;
    }
    return hashed_.insert(code).second;
  }

 private:
  std::vector<std::uint64_t> bits_;
  std::unordered_set<MatrixCode> hashed_;
};

}  // namespace detail

class MatrixGroup {
 public:
  // The trivial group of level 1.
  MatrixGroup() : MatrixGroup(1, {ZMatrix::identity(1)}, {}) {}

  // `elements` must form a group; they are sorted and deduplicated here. When
  // `generators` is empty a small generating set is derived greedily.
  MatrixGroup(Modulus n, ElementList elements, ElementList generators)
      : data_(std::make_shared<Data>()) {
    data_->modulus = n;
    canonicalize(elements);
    data_->elements = std::move(elements);
    data_->codes.reserve(data_->elements.size());
    for (const auto& m : data_->elements) {
      if (m.modulus() != n) throw ModulusMismatch(n, m.modulus());
      data_->codes.push_back(m.encode());
    }
    data_->generators = generators.empty() ? derive_generators() : std::move(generators);
  }

  Modulus modulus() const noexcept { return data_->modulus; }
  std::size_t order() const noexcept { return data_->elements.size(); }
  const ElementList& elements() const noexcept { return data_->elements; }
  const std::vector<MatrixCode>& codes() const noexcept { return data_->codes; }
  const ElementList& generators() const noexcept { return data_->generators; }

  bool contains(MatrixCode code) const {
    return std::binary_search(data_->codes.begin(), data_->codes.end(), code);
  }
  bool contains(const ZMatrix& m) const { return m.modulus() == modulus() && contains(m.encode()); }

  bool is_subgroup_of(const MatrixGroup& other) const {
    if (other.modulus() != modulus() || other.order() % order() != 0) return false;
    return std::includes(other.codes().begin(), other.codes().end(), codes().begin(), codes().end());
  }

  friend bool operator==(const MatrixGroup& x, const MatrixGroup& y) {
    return x.modulus() == y.modulus() && x.codes() == y.codes();
  }

  // Lexicographic order on the canonical code lists.
  friend bool canonical_less(const MatrixGroup& x, const MatrixGroup& y) {
    if (x.modulus() != y.modulus()) return x.modulus() < y.modulus();
    return std::lexicographical_compare(x.codes().begin(), x.codes().end(), y.codes().begin(),
                                        y.codes().end());
  }

 private:
  struct Data {
    Modulus modulus = 1;
    ElementList elements;
    std::vector<MatrixCode> codes;
    ElementList generators;
  };

  ElementList derive_generators() const;

  std::shared_ptr<Data> data_;
};

// Breadth-first closure of a generating set. Throws NotInvertible for a
// singular generator and ModulusMismatch for mixed moduli.
inline MatrixGroup closure(const ElementList& gens, Modulus n) {
  checked_modulus(n);
  for (const auto& g : gens) {
    if (g.modulus() != n) throw ModulusMismatch(n, g.modulus());
    if (!g.is_invertible()) throw NotInvertible("generator has non-unit determinant");
  }
  detail::CodeSet seen(n);
  ElementList elements{ZMatrix::identity(n)};
  seen.insert(elements.front().encode());
  for (std::size_t i = 0; i < elements.size(); ++i) {
    for (const auto& s : gens) {
      ZMatrix y = mul_unchecked(elements[i], s);
      if (seen.insert(y.encode())) elements.push_back(y);
    }
  }
  ElementList kept_gens = gens;
  canonicalize(kept_gens);
  kept_gens.erase(std::remove(kept_gens.begin(), kept_gens.end(), ZMatrix::identity(n)), kept_gens.end());
  if (kept_gens.empty()) kept_gens.push_back(ZMatrix::identity(n));
  return MatrixGroup(n, std::move(elements), std::move(kept_gens));
}

inline ElementList MatrixGroup::derive_generators() const {
  const Modulus n = modulus();
  ElementList gens;
  std::vector<MatrixCode> covered{ZMatrix::identity(n).encode()};
  for (std::size_t i = 0; i < data_->elements.size() && covered.size() < data_->elements.size(); ++i) {
    const ZMatrix& m = data_->elements[i];
    if (std::binary_search(covered.begin(), covered.end(), m.encode())) continue;
    gens.push_back(m);
    MatrixGroup sub = closure(gens, n);
    covered = sub.codes();
  }
  if (gens.empty()) gens.push_back(ZMatrix::identity(n));
  return gens;
}

inline MatrixGroup trivial_group(Modulus n) { return MatrixGroup(n, {ZMatrix::identity(n)}, {}); }

inline MatrixGroup plus_minus_identity(Modulus n) {
  return closure({ZMatrix::minus_identity(n)}, n);
}

// Subgroup of GL2(Z/n) cut out by a predicate; the caller guarantees closure.
template <typename Pred>
MatrixGroup group_from_predicate(Modulus n, Pred&& pred) {
  ElementList elements;
  for_each_gl2(n, [&](const ZMatrix& m) {
    if (pred(m)) elements.push_back(m);
  });
  return MatrixGroup(n, std::move(elements), {});
}

inline MatrixGroup full_group(Modulus n) {
  return group_from_predicate(n, [](const ZMatrix&) { return true; });
}

inline MatrixGroup special_linear_group(Modulus n) {
  const std::uint32_t one = n == 1 ? 0 : 1;
  return group_from_predicate(n, [one](const ZMatrix& m) { return m.det_value() == one; });
}

inline void check_same_modulus(const MatrixGroup& x, const MatrixGroup& y) {
  if (x.modulus() != y.modulus()) throw ModulusMismatch(x.modulus(), y.modulus());
}

// g H g^-1
inline MatrixGroup conjugate_group(const MatrixGroup& h, const ZMatrix& g) {
  if (g.modulus() != h.modulus()) throw ModulusMismatch(h.modulus(), g.modulus());
  const ZMatrix g_inv = mat_inv(g);
  ElementList elements, gens;
  elements.reserve(h.order());
  for (const auto& x : h.elements()) elements.push_back(mul_unchecked(mul_unchecked(g, x), g_inv));
  for (const auto& x : h.generators()) gens.push_back(mul_unchecked(mul_unchecked(g, x), g_inv));
  return MatrixGroup(h.modulus(), std::move(elements), std::move(gens));
}

// True when g H g^-1 = H; checked on generators.
inline bool normalizes(const ZMatrix& g, const MatrixGroup& h) {
  const ZMatrix g_inv = mat_inv(g);
  return std::all_of(h.generators().begin(), h.generators().end(),
                     [&](const ZMatrix& x) { return h.contains(mul_unchecked(mul_unchecked(g, x), g_inv)); });
}

// N(H) in GL2(Z/n).
inline MatrixGroup normalizer(const MatrixGroup& h) {
  return group_from_predicate(h.modulus(), [&](const ZMatrix& g) { return normalizes(g, h); });
}

inline MatrixGroup intersect(const MatrixGroup& x, const MatrixGroup& y) {
  check_same_modulus(x, y);
  ElementList common;
  for (const auto& m : x.elements())
    if (y.contains(m)) common.push_back(m);
  return MatrixGroup(x.modulus(), std::move(common), {});
}

inline MatrixGroup intersect_sl2(const MatrixGroup& h) {
  const std::uint32_t one = h.modulus() == 1 ? 0 : 1;
  ElementList kept;
  for (const auto& m : h.elements())
    if (m.det_value() == one) kept.push_back(m);
  return MatrixGroup(h.modulus(), std::move(kept), {});
}

// {±1} H
inline MatrixGroup plus_minus(const MatrixGroup& h) {
  if (h.contains(ZMatrix::minus_identity(h.modulus()))) return h;
  ElementList gens = h.generators();
  gens.push_back(ZMatrix::minus_identity(h.modulus()));
  return closure(gens, h.modulus());
}

// [G : H]; throws NotSubgroup unless H <= G.
inline std::size_t index(const MatrixGroup& g, const MatrixGroup& h) {
  check_same_modulus(g, h);
  if (!h.is_subgroup_of(g)) throw NotSubgroup("index: H is not contained in G");
  return g.order() / h.order();
}

// Closure of the generators reduced mod m.
inline MatrixGroup reduce_group(const MatrixGroup& g, Modulus m) {
  ElementList gens;
  for (const auto& x : g.generators()) gens.push_back(mat_reduce(x, m));
  return closure(gens, m);
}

// ST = {st : s in S, t in T}, canonicalized.
inline ElementList subset_product(const ElementList& s, const ElementList& t) {
  ElementList out;
  out.reserve(s.size() * t.size());
  for (const auto& x : s)
    for (const auto& y : t) out.push_back(x * y);
  canonicalize(out);
  return out;
}

inline ElementList set_intersection(const ElementList& s, const ElementList& t) {
  ElementList out;
  std::set_intersection(s.begin(), s.end(), t.begin(), t.end(), std::back_inserter(out));
  return out;
}

// Kernel of reduction GL2(Z/level) -> GL2(Z/m).
inline ElementList reduction_kernel(Modulus level, Modulus m) {
  if (m == 0 || level % m != 0) throw NotDivisor(m, level);
  const ZMatrix id = ZMatrix::identity(m);
  ElementList kernel;
  for_each_gl2(level, [&](const ZMatrix& x) {
    if (mat_reduce(x, m) == id) kernel.push_back(x);
  });
  return kernel;
}

// Checks (ker pi_n)(ker pi_m) = ker pi_gcd(n,m) inside GL2(Z/level).
inline bool kernel_product_check(Modulus n, Modulus m, Modulus level) {
  if (n == 0 || level % n != 0) throw NotDivisor(n, level);
  if (m == 0 || level % m != 0) throw NotDivisor(m, level);
  const ElementList product = subset_product(reduction_kernel(level, n), reduction_kernel(level, m));
  return product == reduction_kernel(level, std::gcd(n, m));
}

struct DoubleCoset {
  ZMatrix representative;  // minimal encoding in H g G
  std::size_t size = 0;
};

// Partition of GL2(Z/n) into double cosets H g G; `label` is indexed by
// GLIndex element index. Cosets are numbered by increasing representative.
struct DoubleCosetPartition {
  std::shared_ptr<const GLIndex> space;
  std::vector<DoubleCoset> cosets;
  std::vector<std::uint32_t> label;

  std::size_t coset_of(const ZMatrix& g) const { return label[space->index_of(g)]; }
};

inline std::vector<ElementIndex> to_indices(const GLIndex& space, const MatrixGroup& h) {
  std::vector<ElementIndex> out;
  out.reserve(h.order());
  for (const auto& m : h.elements()) out.push_back(space.index_of(m));
  return out;
}

inline DoubleCosetPartition double_coset_partition(const MatrixGroup& h, const MatrixGroup& g) {
  check_same_modulus(h, g);
  DoubleCosetPartition part;
  part.space = gl_index(h.modulus());
  const GLIndex& space = *part.space;
  constexpr std::uint32_t kUnset = ~std::uint32_t{0};
  part.label.assign(space.size(), kUnset);
  const auto hs = to_indices(space, h);
  const auto gs = to_indices(space, g);
  std::vector<ElementIndex> left(hs.size());
  for (ElementIndex x = 0; x < space.size(); ++x) {
    if (part.label[x] != kUnset) continue;
    const auto id = static_cast<std::uint32_t>(part.cosets.size());
    std::size_t size = 0;
    for (std::size_t i = 0; i < hs.size(); ++i) left[i] = space.mul(hs[i], x);
    for (ElementIndex y : gs) {
      for (ElementIndex l : left) {
        const ElementIndex z = space.mul(l, y);
        if (part.label[z] == kUnset) {
          part.label[z] = id;
          ++size;
        }
      }
    }
    part.cosets.push_back({space.element(x), size});
  }
  return part;
}

inline std::vector<DoubleCoset> double_cosets(const MatrixGroup& h, const MatrixGroup& g) {
  return double_coset_partition(h, g).cosets;
}

// Subgroups of GL2(Z/n) given by generators or by membership predicate.
inline MatrixGroup borel(Modulus n) {
  return group_from_predicate(n, [](const ZMatrix& m) { return m.c() == 0; });
}

inline MatrixGroup borel1(Modulus n, bool with_minus_identity = false) {
  MatrixGroup b1 = group_from_predicate(n, [](const ZMatrix& m) { return m.c() == 0 && m.a() == 1 % m.modulus(); });
  return with_minus_identity ? plus_minus(b1) : b1;
}

}  // namespace modcurve
