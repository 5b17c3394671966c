#pragma once

// The lattice of subgroups of GL2(Z/n) containing -I, with conjugacy classes,
// normalizers of class representatives and maximal inclusions.
//
// Enumeration is bottom-up: starting from <-I>, every known subgroup is
// extended by one element outside it and closed, until no new subgroup
// appears. Every subgroup containing -I is reached along a chain
// <-I> < <-I, g1> < <-I, g1, g2> < ..., so the fixpoint is the full lattice.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "modcurve/error.hpp"
#include "modcurve/gl_index.hpp"
#include "modcurve/group.hpp"
#include "modcurve/parallel.hpp"

namespace modcurve {

struct LatticeOptions {
  std::uint64_t max_group_order = 250000;  // feasibility bound on |GL2(Z/n)|
  unsigned jobs = 1;
};

struct ConjugacyClass {
  std::size_t representative = 0;    // subgroup id; canonically least member
  std::vector<std::size_t> members;  // increasing subgroup ids
  MatrixGroup normalizer;            // normalizer of the representative
};

using Inclusion = std::pair<std::size_t, std::size_t>;  // (H, H') with H maximal in H'

class SubgroupLattice {
 public:
  SubgroupLattice() = default;

  // Assembles a lattice and its lookup tables. `conjugators[s]` must conjugate
  // the representative of s's class onto s. Subgroups must be ordered by
  // (order, canonical element list). Throws DataError on inconsistent input.
  SubgroupLattice(Modulus n, std::vector<MatrixGroup> subgroups, std::vector<ConjugacyClass> classes,
                  std::vector<ZMatrix> conjugators, std::vector<Inclusion> maximal)
      : n_(n),
        subgroups_(std::move(subgroups)),
        classes_(std::move(classes)),
        conjugators_(std::move(conjugators)),
        maximal_(std::move(maximal)) {
    const std::size_t count = subgroups_.size();
    if (conjugators_.size() != count) throw DataError("lattice: conjugator count mismatch");
    class_of_.assign(count, count);
    for (std::size_t c = 0; c < classes_.size(); ++c) {
      for (std::size_t s : classes_[c].members) {
        if (s >= count || class_of_[s] != count) throw DataError("lattice: classes do not partition subgroups");
        class_of_[s] = c;
      }
      if (classes_[c].members.empty() || classes_[c].members.front() != classes_[c].representative) {
        throw DataError("lattice: class representative must be its least member");
      }
    }
    for (std::size_t s = 0; s < count; ++s) {
      if (class_of_[s] == count) throw DataError("lattice: subgroup without class");
      if (subgroups_[s].modulus() != n_) throw DataError("lattice: modulus mismatch");
      by_codes_.emplace(subgroups_[s].codes(), s);
    }
    if (by_codes_.size() != count) throw DataError("lattice: duplicate subgroups");
    over_.assign(count, {});
    under_.assign(count, {});
    std::sort(maximal_.begin(), maximal_.end());
    for (auto [sub, super] : maximal_) {
      if (sub >= count || super >= count) throw DataError("lattice: inclusion out of range");
      over_[sub].push_back(super);
      under_[super].push_back(sub);
    }
  }

  Modulus modulus() const noexcept { return n_; }
  std::size_t size() const noexcept { return subgroups_.size(); }
  const std::vector<MatrixGroup>& subgroups() const noexcept { return subgroups_; }
  const MatrixGroup& subgroup(std::size_t s) const { return subgroups_.at(s); }
  const std::vector<ConjugacyClass>& classes() const noexcept { return classes_; }
  std::size_t class_of(std::size_t s) const { return class_of_.at(s); }
  const ConjugacyClass& class_for(std::size_t s) const { return classes_[class_of(s)]; }
  // c with c R c^-1 = subgroup(s), R the class representative.
  const ZMatrix& conjugator(std::size_t s) const { return conjugators_.at(s); }
  const std::vector<Inclusion>& maximal_inclusions() const noexcept { return maximal_; }
  const std::vector<std::size_t>& maximal_supergroups(std::size_t s) const { return over_.at(s); }
  const std::vector<std::size_t>& maximal_subgroups(std::size_t s) const { return under_.at(s); }

  std::optional<std::size_t> find(const MatrixGroup& h) const {
    if (h.modulus() != n_) return std::nullopt;
    auto it = by_codes_.find(h.codes());
    if (it == by_codes_.end()) return std::nullopt;
    return it->second;
  }

  // Class id of an arbitrary subgroup containing -I.
  std::optional<std::size_t> class_of_group(const MatrixGroup& h) const {
    auto s = find(h);
    if (!s) return std::nullopt;
    return class_of(*s);
  }

 private:
  Modulus n_ = 1;
  std::vector<MatrixGroup> subgroups_;
  std::vector<ConjugacyClass> classes_;
  std::vector<ZMatrix> conjugators_;
  std::vector<Inclusion> maximal_;
  std::vector<std::size_t> class_of_;
  std::map<std::vector<MatrixCode>, std::size_t> by_codes_;
  std::vector<std::vector<std::size_t>> over_, under_;
};

namespace detail {

struct IndexedSubgroup {
  ElementSet members;
  std::vector<ElementIndex> gens;
};

inline ElementSet close_indices(const GLIndex& space, const std::vector<ElementIndex>& gens,
                                std::vector<ElementIndex>& scratch) {
  ElementSet seen(space.size());
  scratch.clear();
  scratch.push_back(space.identity());
  seen.insert(space.identity());
  for (std::size_t i = 0; i < scratch.size(); ++i) {
    for (ElementIndex s : gens) {
      const ElementIndex y = space.mul(scratch[i], s);
      if (!seen.contains(y)) {
        seen.insert(y);
        scratch.push_back(y);
      }
    }
  }
  return seen;
}

// All subgroups <H, g> for g outside H, deduplicated, in order of first g.
inline std::vector<IndexedSubgroup> extend_by_one(const GLIndex& space, const IndexedSubgroup& h) {
  std::vector<IndexedSubgroup> found;
  std::unordered_set<ElementSet, ElementSetHash> local;
  ElementSet covered = h.members;
  const auto h_members = h.members.members();
  std::vector<ElementIndex> scratch;
  for (ElementIndex g = 0; g < space.size(); ++g) {
    if (covered.contains(g)) continue;
    // <H, hg> = <H, g> for every h in H.
    for (ElementIndex x : h_members) covered.insert(space.mul(x, g));
    std::vector<ElementIndex> gens = h.gens;
    gens.push_back(g);
    ElementSet k = close_indices(space, gens, scratch);
    if (local.insert(k).second) found.push_back({std::move(k), std::move(gens)});
  }
  return found;
}

}  // namespace detail

inline SubgroupLattice enumerate_subgroups_containing_minus_I(Modulus n, const LatticeOptions& options = {}) {
  checked_modulus(n);
  const std::uint64_t order = gl2_order(n);
  if (order > options.max_group_order) {
    throw TooLarge("|GL2(Z/" + std::to_string(n) + ")| = " + std::to_string(order) +
                   " exceeds the enumeration bound " + std::to_string(options.max_group_order));
  }
  auto space_ptr = gl_index(n);
  const GLIndex& space = *space_ptr;

  std::vector<detail::IndexedSubgroup> nodes;
  std::unordered_map<ElementSet, std::size_t, ElementSetHash> ids;
  {
    std::vector<ElementIndex> scratch;
    std::vector<ElementIndex> gens{space.minus_identity()};
    ElementSet start = detail::close_indices(space, gens, scratch);
    ids.emplace(start, 0);
    nodes.push_back({std::move(start), std::move(gens)});
  }
  std::vector<std::size_t> frontier{0};
  while (!frontier.empty()) {
    std::vector<std::vector<detail::IndexedSubgroup>> found(frontier.size());
    parallel_for(frontier.size(), options.jobs,
                 [&](std::size_t k) { found[k] = detail::extend_by_one(space, nodes[frontier[k]]); });
    std::vector<std::size_t> next;
    for (auto& batch : found) {
      for (auto& candidate : batch) {
        if (ids.emplace(candidate.members, nodes.size()).second) {
          next.push_back(nodes.size());
          nodes.push_back(std::move(candidate));
        }
      }
    }
    frontier = std::move(next);
  }

  // Canonical order: by order, then lexicographically by element list.
  std::vector<std::vector<ElementIndex>> member_lists(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) member_lists[i] = nodes[i].members.members();
  std::vector<std::size_t> perm(nodes.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](std::size_t x, std::size_t y) {
    if (member_lists[x].size() != member_lists[y].size()) return member_lists[x].size() < member_lists[y].size();
    return member_lists[x] < member_lists[y];
  });
  const std::size_t count = nodes.size();
  std::vector<MatrixGroup> subgroups;
  std::vector<ElementSet> sets;
  std::vector<std::vector<ElementIndex>> lists;
  std::unordered_map<ElementSet, std::size_t, ElementSetHash> id_of;
  subgroups.reserve(count);
  for (std::size_t rank = 0; rank < count; ++rank) {
    const auto& node = nodes[perm[rank]];
    ElementList elements, gens;
    for (ElementIndex i : member_lists[perm[rank]]) elements.push_back(space.element(i));
    for (ElementIndex i : node.gens) gens.push_back(space.element(i));
    canonicalize(gens);
    subgroups.emplace_back(n, std::move(elements), std::move(gens));
    id_of.emplace(node.members, rank);
    sets.push_back(node.members);
    lists.push_back(member_lists[perm[rank]]);
  }

  // Conjugacy classes. The least member of a class comes first in the
  // canonical order, so it is reached first and becomes the representative.
  std::vector<ConjugacyClass> classes;
  std::vector<ZMatrix> conjugators(count);
  std::vector<bool> assigned(count, false);
  ElementSet image(space.size());
  for (std::size_t s = 0; s < count; ++s) {
    if (assigned[s]) continue;
    ConjugacyClass cls;
    cls.representative = s;
    ElementList normalizer_elements;
    std::map<std::size_t, ElementIndex> first_conjugator;
    for (ElementIndex g = 0; g < space.size(); ++g) {
      image.clear();
      for (ElementIndex x : lists[s]) image.insert(space.conjugate(g, x));
      auto it = id_of.find(image);
      if (it == id_of.end()) throw std::logic_error("conjugate subgroup missing from lattice");
      first_conjugator.emplace(it->second, g);
      if (it->second == s) normalizer_elements.push_back(space.element(g));
    }
    for (auto [target, g] : first_conjugator) {
      if (assigned[target]) throw std::logic_error("conjugacy classes overlap");
      assigned[target] = true;
      cls.members.push_back(target);
      conjugators[target] = space.element(g);
    }
    cls.normalizer = MatrixGroup(n, std::move(normalizer_elements), {});
    classes.push_back(std::move(cls));
  }

  // Maximal inclusions within the lattice.
  std::vector<std::vector<std::size_t>> supers(count);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = i + 1; j < count; ++j) {
      if (lists[j].size() > lists[i].size() && lists[j].size() % lists[i].size() == 0 &&
          sets[i].is_subset_of(sets[j])) {
        supers[i].push_back(j);
      }
    }
  }
  std::vector<Inclusion> maximal;
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j : supers[i]) {
      bool is_maximal = true;
      for (std::size_t k : supers[i]) {
        if (lists[k].size() < lists[j].size() && lists[j].size() % lists[k].size() == 0 &&
            sets[k].is_subset_of(sets[j])) {
          is_maximal = false;
          break;
        }
      }
      if (is_maximal) maximal.emplace_back(i, j);
    }
  }

  return SubgroupLattice(n, std::move(subgroups), std::move(classes), std::move(conjugators), std::move(maximal));
}

}  // namespace modcurve
