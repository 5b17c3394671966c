#pragma once

// JSON shapes for curves and graphs, and the on-disk subgroup-lattice cache.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "modcurve/curves.hpp"
#include "modcurve/galois.hpp"
#include "modcurve/isograph.hpp"
#include "modcurve/lattice.hpp"
#include "modcurve/text.hpp"

namespace modcurve {

using Json = nlohmann::json;

inline Json to_json(const CurveInvariants& inv, const std::vector<ClosedPointClass>& points = {}) {
  Json gens = Json::array();
  for (const auto& g : inv.subgroup.generators()) gens.push_back(format_entries(g));
  Json pts = Json::array();
  for (const auto& p : points) pts.push_back({{"rep", format_entries(p.coset.representative)}, {"degree", p.degree}});
  return {{"level", inv.level},
          {"subgroup_generators", gens},
          {"components", inv.components},
          {"genus", inv.genus},
          {"sl2_index", inv.sl2_index},
          {"cusps", inv.cusp_count},
          {"e2", inv.e2_count},
          {"e3", inv.e3_count},
          {"points", pts}};
}

inline std::string edge_kind_name(std::uint8_t kinds) {
  if (kinds == (kPullback | kPushforward)) return "pullback+pushforward";
  return kinds == kPullback ? "pullback" : "pushforward";
}

inline Json to_json(const IsolationGraph& g) {
  Json vertices = Json::array();
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    const Vertex& x = g.vertices[v];
    vertices.push_back({{"subgroup", format_group(x.subgroup)},
                        {"rep", format_entries(x.coset_key)},
                        {"degree", x.degree},
                        {"components", x.components},
                        {"genus", x.genus},
                        {"count", x.multiplicity},
                        {"pruned", !g.pruned.empty() && g.pruned[v]}});
  }
  Json edges = Json::array();
  for (const Edge& e : g.edges) edges.push_back({{"src", e.source}, {"dst", e.target}, {"kind", edge_kind_name(e.kinds)}});
  return {{"level", g.level},
          {"j_invariant", format_rational(g.j_invariant)},
          {"graph", g.quotient ? "quotient" : "full"},
          {"edge_mode", to_string(g.mode)},
          {"vertex_count", g.vertices.size()},
          {"edge_count", g.edges.size()},
          {"pruned_count", g.pruned_count()},
          {"vertices", vertices},
          {"edges", edges}};
}

// ---------------------------------------------------------------------------
// Lattice cache

inline constexpr int kLatticeCacheVersion = 1;

inline std::filesystem::path default_cache_dir() {
  if (const char* env = std::getenv("MODCURVE_CACHE_DIR"); env && *env) return env;
  if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg) return std::filesystem::path(xdg) / "modcurve";
  if (const char* home = std::getenv("HOME"); home && *home) return std::filesystem::path(home) / ".cache" / "modcurve";
  return std::filesystem::temp_directory_path() / "modcurve";
}

inline std::filesystem::path lattice_cache_path(const std::filesystem::path& dir, Modulus n) {
  return dir / ("lattice_" + std::to_string(n) + ".json");
}

namespace detail {

inline Json codes_json(const ElementList& list) {
  Json out = Json::array();
  for (const auto& m : list) out.push_back(m.encode());
  return out;
}

inline ElementList codes_from_json(const Json& j, Modulus n) {
  ElementList out;
  for (const auto& c : j) out.push_back(ZMatrix::decode(c.get<MatrixCode>(), n));
  return out;
}

inline std::string payload_checksum(const Json& payload) {
  std::ostringstream hex;
  hex << std::hex;
  hex.width(16);
  hex.fill('0');
  hex << fnv1a64(payload.dump());
  return hex.str();
}

}  // namespace detail

inline Json lattice_to_json(const SubgroupLattice& lattice) {
  Json subgroups = Json::array(), generators = Json::array(), classes = Json::array(), conjugators = Json::array(),
       maximal = Json::array();
  for (const auto& h : lattice.subgroups()) {
    subgroups.push_back(detail::codes_json(h.elements()));
    generators.push_back(detail::codes_json(h.generators()));
  }
  for (const auto& c : lattice.classes()) {
    classes.push_back({{"representative", c.representative},
                       {"members", c.members},
                       {"normalizer", detail::codes_json(c.normalizer.elements())}});
  }
  for (std::size_t s = 0; s < lattice.size(); ++s) conjugators.push_back(lattice.conjugator(s).encode());
  for (const auto& [sub, super] : lattice.maximal_inclusions()) maximal.push_back({sub, super});
  Json payload = {{"level", lattice.modulus()},   {"subgroups", subgroups},     {"generators", generators},
                  {"classes", classes},           {"conjugators", conjugators}, {"maximal_inclusions", maximal}};
  return {{"format_version", kLatticeCacheVersion},
          {"checksum", detail::payload_checksum(payload)},
          {"payload", payload}};
}

// Throws DataError on any inconsistency.
inline SubgroupLattice lattice_from_json(const Json& doc) {
  try {
    if (doc.at("format_version").get<int>() != kLatticeCacheVersion) {
      throw DataError("lattice cache: unsupported format_version");
    }
    const Json& payload = doc.at("payload");
    if (doc.at("checksum").get<std::string>() != detail::payload_checksum(payload)) {
      throw DataError("lattice cache: checksum mismatch");
    }
    const Modulus n = checked_modulus(payload.at("level").get<std::int64_t>());
    std::vector<MatrixGroup> subgroups;
    const Json& gens = payload.at("generators");
    const Json& elems = payload.at("subgroups");
    if (gens.size() != elems.size()) throw DataError("lattice cache: generator count mismatch");
    for (std::size_t s = 0; s < elems.size(); ++s) {
      subgroups.emplace_back(n, detail::codes_from_json(elems[s], n), detail::codes_from_json(gens[s], n));
    }
    std::vector<ConjugacyClass> classes;
    for (const auto& c : payload.at("classes")) {
      ConjugacyClass cls;
      cls.representative = c.at("representative").get<std::size_t>();
      cls.members = c.at("members").get<std::vector<std::size_t>>();
      cls.normalizer = MatrixGroup(n, detail::codes_from_json(c.at("normalizer"), n), {});
      classes.push_back(std::move(cls));
    }
    std::vector<ZMatrix> conjugators = detail::codes_from_json(payload.at("conjugators"), n);
    std::vector<Inclusion> maximal;
    for (const auto& inc : payload.at("maximal_inclusions")) {
      maximal.emplace_back(inc.at(0).get<std::size_t>(), inc.at(1).get<std::size_t>());
    }
    return SubgroupLattice(n, std::move(subgroups), std::move(classes), std::move(conjugators), std::move(maximal));
  } catch (const Json::exception& e) {
    throw DataError(std::string("lattice cache: ") + e.what());
  }
}

inline void save_lattice(const SubgroupLattice& lattice, const std::filesystem::path& path) {
  std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw DataError("cannot write " + tmp);
    out << lattice_to_json(lattice).dump() << '\n';
  }
  std::filesystem::rename(tmp, path);
}

struct LatticeLoad {
  std::optional<SubgroupLattice> lattice;
  bool from_cache = false;
  std::string warning;  // set when a cache file existed but was unusable
};

// Loads the cached lattice for level n, rebuilding (and rewriting the cache)
// when it is missing or unusable. A file with another format_version is
// replaced silently; a corrupt file is replaced with a warning.
inline LatticeLoad cached_lattice(Modulus n, const std::filesystem::path& dir, const LatticeOptions& options = {}) {
  LatticeLoad result;
  const auto path = lattice_cache_path(dir, n);
  if (std::filesystem::exists(path)) {
    try {
      std::ifstream in(path);
      const Json doc = Json::parse(in);
      if (doc.value("format_version", -1) == kLatticeCacheVersion) {
        SubgroupLattice lattice = lattice_from_json(doc);
        if (lattice.modulus() != n) throw DataError("lattice cache: level mismatch");
        result.lattice = std::move(lattice);
        result.from_cache = true;
        return result;
      }
    } catch (const std::exception& e) {
      result.warning = "ignoring unusable lattice cache " + path.string() + ": " + e.what();
    }
  }
  result.lattice = enumerate_subgroups_containing_minus_I(n, options);
  try {
    save_lattice(*result.lattice, path);
  } catch (const std::exception& e) {
    if (!result.warning.empty()) result.warning += "; ";
    result.warning += std::string("could not write lattice cache: ") + e.what();
  }
  return result;
}

}  // namespace modcurve
