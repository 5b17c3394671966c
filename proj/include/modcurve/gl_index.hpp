#pragma once

// GL2(Z/n) enumerated in encoding order, so that element indices inherit the
// canonical ordering. Small groups additionally get a full multiplication
// table; this is what makes the level-7 lattice computations fast.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "modcurve/error.hpp"
#include "modcurve/zmatrix.hpp"

namespace modcurve {

using ElementIndex = std::uint32_t;

inline constexpr std::uint64_t kMaxIndexedGroupOrder = std::uint64_t{1} << 22;
inline constexpr std::uint64_t kMaxTableGroupOrder = 4096;

// Calls f(ZMatrix) for every element of GL2(Z/n) in increasing encoding order.
template <typename F>
void for_each_gl2(Modulus n, F&& f) {
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = 0; b < n; ++b)
      for (std::uint32_t c = 0; c < n; ++c)
        for (std::uint32_t d = 0; d < n; ++d) {
          const std::uint64_t det = (std::uint64_t{a} * d + std::uint64_t{n} * n - std::uint64_t{b} * c) % n;
          if (is_unit(static_cast<std::uint32_t>(det), n)) f(ZMatrix::from_reduced(a, b, c, d, n));
        }
}

class GLIndex {
 public:
  explicit GLIndex(Modulus n) : n_(checked_modulus(n)) {
    const std::uint64_t order = gl2_order(n_);
    if (order > kMaxIndexedGroupOrder) {
      throw TooLarge("|GL2(Z/" + std::to_string(n_) + ")| = " + std::to_string(order) +
                     " exceeds the indexing bound");
    }
    elements_.reserve(order);
    const std::uint64_t space = std::uint64_t{n_} * n_ * n_ * n_;
    if (space <= (std::uint64_t{1} << 24)) dense_.assign(space, kAbsent);
    for_each_gl2(n_, [&](const ZMatrix& m) {
      const auto idx = static_cast<ElementIndex>(elements_.size());
      elements_.push_back(m);
      if (!dense_.empty()) {
        dense_[m.encode()] = idx;
      } else {
        sparse_.emplace(m.encode(), idx);
      }
    });
    identity_ = index_of(ZMatrix::identity(n_));
    minus_identity_ = index_of(ZMatrix::minus_identity(n_));
    inverse_.resize(elements_.size());
    for (ElementIndex i = 0; i < elements_.size(); ++i) inverse_[i] = index_of(mat_inv(elements_[i]));
    if (elements_.size() <= kMaxTableGroupOrder) build_table();
  }

  Modulus modulus() const noexcept { return n_; }
  std::size_t size() const noexcept { return elements_.size(); }
  const ZMatrix& element(ElementIndex i) const { return elements_[i]; }
  const std::vector<ZMatrix>& elements() const noexcept { return elements_; }
  ElementIndex identity() const noexcept { return identity_; }
  ElementIndex minus_identity() const noexcept { return minus_identity_; }
  ElementIndex inverse(ElementIndex i) const { return inverse_[i]; }
  bool has_table() const noexcept { return !table_.empty(); }

  ElementIndex index_of(const ZMatrix& m) const {
    const MatrixCode code = m.encode();
    if (!dense_.empty()) {
      const ElementIndex idx = dense_[code];
      if (idx == kAbsent) throw NotInvertible("matrix is not in GL2");
      return idx;
    }
    auto it = sparse_.find(code);
    if (it == sparse_.end()) throw NotInvertible("matrix is not in GL2");
    return it->second;
  }

  ElementIndex mul(ElementIndex i, ElementIndex j) const {
    if (!table_.empty()) return table_[std::size_t{i} * elements_.size() + j];
    return index_of(mul_unchecked(elements_[i], elements_[j]));
  }

  // g x g^-1
  ElementIndex conjugate(ElementIndex g, ElementIndex x) const { return mul(mul(g, x), inverse_[g]); }

 private:
  static constexpr ElementIndex kAbsent = ~ElementIndex{0};

  void build_table() {
    const std::size_t size = elements_.size();
    table_.resize(size * size);
    for (std::size_t i = 0; i < size; ++i)
      for (std::size_t j = 0; j < size; ++j)
        table_[i * size + j] = index_of(mul_unchecked(elements_[i], elements_[j]));
  }

  Modulus n_;
  std::vector<ZMatrix> elements_;
  std::vector<ElementIndex> dense_;
  std::unordered_map<MatrixCode, ElementIndex> sparse_;
  std::vector<ElementIndex> inverse_;
  std::vector<ElementIndex> table_;
  ElementIndex identity_ = 0;
  ElementIndex minus_identity_ = 0;
};

// Shared, lazily built index per modulus.
inline std::shared_ptr<const GLIndex> gl_index(Modulus n) {
  static std::mutex mutex;
  static std::map<Modulus, std::shared_ptr<const GLIndex>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_shared<const GLIndex>(n);
  return slot;
}

// Fixed-size bitset over element indices; used as a subgroup key.
class ElementSet {
 public:
  ElementSet() = default;
  explicit ElementSet(std::size_t universe) : words_((universe + 63) / 64, 0) {}

  void insert(ElementIndex i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  bool contains(ElementIndex i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void clear() { std::fill(words_.begin(), words_.end(), 0); }

  bool is_subset_of(const ElementSet& o) const {
    for (std::size_t w = 0; w < words_.size(); ++w)
      if (words_[w] & ~o.words_[w]) return false;
    return true;
  }

  std::vector<ElementIndex> members() const {
    std::vector<ElementIndex> out;
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits) {
        out.push_back(static_cast<ElementIndex>(w * 64 + static_cast<std::size_t>(__builtin_ctzll(bits))));
        bits &= bits - 1;
      }
    }
    return out;
  }

  const std::vector<std::uint64_t>& words() const noexcept { return words_; }

  friend bool operator==(const ElementSet&, const ElementSet&) = default;

 private:
  std::vector<std::uint64_t> words_;
};

struct ElementSetHash {
  std::size_t operator()(const ElementSet& s) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::uint64_t w : s.words()) {
      h ^= w;
      h *= 0x100000001b3ull;
      h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace modcurve
