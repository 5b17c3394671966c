#pragma once

// Report builders behind the command-line tool. Each returns the complete
// output text plus the result of its internal consistency checks, so the
// caller can print once and choose the exit status.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "modcurve/curves.hpp"
#include "modcurve/galois.hpp"
#include "modcurve/io.hpp"
#include "modcurve/isograph.hpp"
#include "modcurve/lattice.hpp"
#include "modcurve/text.hpp"

namespace modcurve {

enum class OutputFormat { Table, Json, Csv, Dot };

struct RunConfig {
  std::filesystem::path cache_dir = default_cache_dir();
  OutputFormat format = OutputFormat::Table;
  unsigned jobs = 1;
  bool full_graph = false;
  std::optional<std::filesystem::path> dot_path;
  std::optional<std::filesystem::path> generators;
};

struct Report {
  std::string text;
  std::string warnings;  // destined for stderr
  bool ok = true;
};

// Generators of H modulo ±I, chosen greedily in encoding order, written as
// <±[[a,b],[c,d]],...>.
inline std::string pm_generators(const MatrixGroup& h) {
  const Modulus n = h.modulus();
  ElementList gens;
  MatrixGroup current = plus_minus_identity(n);
  for (const auto& x : h.elements()) {
    if (current.order() == h.order()) break;
    if (current.contains(x)) continue;
    gens.push_back(x);
    ElementList with_sign = gens;
    with_sign.push_back(ZMatrix::minus_identity(n));
    current = closure(with_sign, n);
  }
  std::string out = "<±";
  if (gens.empty()) out += "I";
  for (std::size_t i = 0; i < gens.size(); ++i) {
    if (i) out += ",";
    out += format_entries(gens[i]);
  }
  return out + ">";
}

namespace detail {

inline std::string pad(const std::string& s, std::size_t width) {
  // Column widths count code points so that "±" lines up.
  std::size_t cps = 0;
  for (unsigned char c : s) cps += (c & 0xC0) != 0x80;
  return s + std::string(width > cps ? width - cps : 0, ' ');
}

inline LatticeLoad load_lattice_for(Modulus n, const RunConfig& config) {
  LatticeOptions options;
  options.jobs = config.jobs;
  return cached_lattice(n, config.cache_dir, options);
}

// Sum of |H g G| over the double cosets of every lattice subgroup must be
// |GL2(Z/n)| for each subgroup.
inline bool partitions_consistent(const SubgroupLattice& lattice, const MatrixGroup& g, unsigned jobs) {
  const std::uint64_t total = gl2_order(lattice.modulus());
  std::vector<char> good(lattice.size(), 0);
  parallel_for(lattice.size(), jobs, [&](std::size_t s) {
    std::uint64_t sum = 0;
    for (const auto& c : double_cosets(lattice.subgroup(s), g)) sum += c.size;
    good[s] = sum == total;
  });
  return std::all_of(good.begin(), good.end(), [](char x) { return x != 0; });
}

}  // namespace detail

// Survivor rows in display order: degree, genus, components, count, all descending.
inline std::vector<std::size_t> survivor_rows(const IsolationGraph& g, const SurvivorReport& report) {
  std::vector<std::size_t> rows = report.survivors;
  std::stable_sort(rows.begin(), rows.end(), [&](std::size_t x, std::size_t y) {
    const Vertex& a = g.vertices[x];
    const Vertex& b = g.vertices[y];
    return std::tie(b.degree, b.genus, b.components, b.multiplicity) <
           std::tie(a.degree, a.genus, a.components, a.multiplicity);
  });
  return rows;
}

inline Report cmd_level7(const RunConfig& config) {
  constexpr Modulus n = 7;
  Report report;
  auto load = detail::load_lattice_for(n, config);
  report.warnings = load.warning;
  const SubgroupLattice& lattice = *load.lattice;
  const MatrixGroup g = mod7_image("G1");
  const MatrixGroup a = plus_minus_identity(n);
  GraphOptions options;
  options.jobs = config.jobs;
  options.j_invariant = level7_j_invariant();

  std::size_t census = 0;
  for (const auto& h : lattice.subgroups()) census += double_cosets(h, g).size();
  std::optional<IsolationGraph> full;
  if (config.full_graph) full = build_full_graph(lattice, g, a, options);
  const IsolationGraph quotient = prune_riemann_roch(build_quotient_graph(lattice, g, a, options));
  const SurvivorReport survivors = survivors_analysis(quotient);
  const bool acyclic = topological_order(quotient).has_value();
  report.ok = acyclic && detail::partitions_consistent(lattice, g, config.jobs);

  if (config.dot_path) {
    std::ofstream out(*config.dot_path);
    out << export_dot(quotient);
    if (!out) {
      report.ok = false;
      report.warnings += "could not write " + config.dot_path->string();
    }
  }

  std::ostringstream out;
  const auto rows = survivor_rows(quotient, survivors);
  switch (config.format) {
    case OutputFormat::Dot:
      out << export_dot(quotient);
      break;
    case OutputFormat::Csv:
      out << "subgroup;genus;components;degree;count;pruned\n";
      for (std::size_t v = 0; v < quotient.vertices.size(); ++v) {
        const Vertex& x = quotient.vertices[v];
        out << pm_generators(x.subgroup) << ";" << x.genus << ";" << x.components << ";" << x.degree << ";"
            << x.multiplicity << ";" << (quotient.pruned[v] ? 1 : 0) << "\n";
      }
      break;
    case OutputFormat::Json: {
      Json doc = {{"level", n},
                  {"j_invariant", format_rational(options.j_invariant)},
                  {"subgroups", lattice.size()},
                  {"classes", lattice.classes().size()},
                  {"closed_points", census},
                  {"quotient_graph", to_json(quotient)},
                  {"acyclic", acyclic},
                  {"consistent", report.ok}};
      if (full) doc["full_graph"] = {{"vertices", full->vertices.size()}, {"edges", full->edges.size()}};
      Json table = Json::array();
      for (std::size_t v : rows) {
        const Vertex& x = quotient.vertices[v];
        table.push_back({{"subgroup", pm_generators(x.subgroup)},
                         {"genus", x.genus},
                         {"components", x.components},
                         {"degree", x.degree},
                         {"count", x.multiplicity}});
      }
      doc["survivors"] = table;
      doc["survivor_components"] = survivors.components.size();
      doc["initial_vertices"] = survivors.initial;
      doc["unique_initial_reaches_all"] = survivors.unique_initial_reaches_all;
      out << doc.dump(2) << "\n";
      break;
    }
    case OutputFormat::Table: {
      out << "level " << n << ", j = " << display_rational(options.j_invariant) << ", G = " << format_group(g) << "\n";
      out << "subgroups containing -I: " << lattice.size() << " in " << lattice.classes().size()
          << " conjugacy classes\n";
      out << "closed points above j: " << census << "\n";
      if (full) out << "full isolation graph: " << full->vertices.size() << " vertices, " << full->edges.size() << " edges\n";
      out << "quotient graph: " << quotient.vertices.size() << " vertices, " << quotient.edges.size() << " edges ("
          << to_string(quotient.mode) << " edges, " << (acyclic ? "acyclic" : "cyclic") << ")\n";
      out << "pruned by Riemann-Roch: " << quotient.pruned_count() << ", survivors: " << survivors.survivors.size()
          << "\n";
      out << "survivor subgraph: " << survivors.components.size() << " component(s), " << survivors.initial.size()
          << " initial vertex(es)";
      if (survivors.initial.size() == 1) {
        out << " of degree " << quotient.vertices[survivors.initial.front()].degree
            << (survivors.unique_initial_reaches_all ? ", reaching every survivor" : ", not reaching every survivor");
      }
      out << "\n\n";
      std::size_t width = 1;
      for (std::size_t v : rows) width = std::max(width, pm_generators(quotient.vertices[v].subgroup).size());
      out << detail::pad("H", width) << "  g(X_H)  [Z*:det H]  deg(x)  count\n";
      for (std::size_t v : rows) {
        const Vertex& x = quotient.vertices[v];
        char line[64];
        std::snprintf(line, sizeof line, "  %6zu  %10zu  %6zu  %5zu\n", x.genus, x.components, x.degree, x.multiplicity);
        out << detail::pad(pm_generators(x.subgroup), width) << line;
      }
      break;
    }
  }
  report.text = out.str();
  return report;
}

inline Report cmd_subgroups(Modulus n, const RunConfig& config) {
  Report report;
  auto load = detail::load_lattice_for(n, config);
  report.warnings = load.warning;
  const SubgroupLattice& lattice = *load.lattice;
  std::ostringstream out;
  Json classes = Json::array();
  std::vector<CurveInvariants> invariants(lattice.classes().size());
  parallel_for(invariants.size(), config.jobs,
               [&](std::size_t c) { invariants[c] = genus(lattice.subgroup(lattice.classes()[c].representative)); });
  switch (config.format) {
    case OutputFormat::Json: {
      for (std::size_t c = 0; c < invariants.size(); ++c) {
        const auto& cls = lattice.classes()[c];
        classes.push_back({{"representative", format_group(lattice.subgroup(cls.representative))},
                           {"order", lattice.subgroup(cls.representative).order()},
                           {"class_size", cls.members.size()},
                           {"det_index", invariants[c].components},
                           {"genus", invariants[c].genus}});
      }
      Json doc = {{"level", n},
                  {"subgroups", lattice.size()},
                  {"classes", lattice.classes().size()},
                  {"maximal_inclusions", lattice.maximal_inclusions().size()},
                  {"class_summaries", classes}};
      out << doc.dump(2) << "\n";
      break;
    }
    case OutputFormat::Csv:
      out << "class;order;class_size;det_index;genus;representative\n";
      for (std::size_t c = 0; c < invariants.size(); ++c) {
        const auto& cls = lattice.classes()[c];
        out << c << ";" << lattice.subgroup(cls.representative).order() << ";" << cls.members.size() << ";"
            << invariants[c].components << ";" << invariants[c].genus << ";"
            << format_group(lattice.subgroup(cls.representative)) << "\n";
      }
      break;
    default:
      out << "level " << n << ": " << lattice.size() << " subgroups containing -I in " << lattice.classes().size()
          << " conjugacy classes, " << lattice.maximal_inclusions().size() << " maximal inclusions\n\n";
      out << "class  order  size  det index  genus  representative\n";
      for (std::size_t c = 0; c < invariants.size(); ++c) {
        const auto& cls = lattice.classes()[c];
        char line[64];
        std::snprintf(line, sizeof line, "%5zu  %5zu  %4zu  %9zu  %5zu  ", c, lattice.subgroup(cls.representative).order(),
                      cls.members.size(), invariants[c].components, invariants[c].genus);
        out << line << pm_generators(lattice.subgroup(cls.representative)) << "\n";
      }
      break;
  }
  report.text = out.str();
  return report;
}

inline Report cmd_genus(const std::string& group_text, const RunConfig& config) {
  Report report;
  const MatrixGroup h = parse_group(group_text);
  const CurveInvariants inv = genus(h);
  std::ostringstream out;
  if (config.format == OutputFormat::Json) {
    out << to_json(inv).dump(2) << "\n";
  } else if (config.format == OutputFormat::Csv) {
    out << "level;order;mu;e2;e3;cusps;genus;components\n";
    out << inv.level << ";" << h.order() << ";" << inv.sl2_index << ";" << inv.e2_count << ";" << inv.e3_count << ";"
        << inv.cusp_count << ";" << inv.genus << ";" << inv.components << "\n";
  } else {
    out << "H = " << format_group(h) << ", |H| = " << h.order() << "\n";
    out << "level       " << inv.level << "\n";
    out << "mu          " << inv.sl2_index << "\n";
    out << "e2          " << inv.e2_count << "\n";
    out << "e3          " << inv.e3_count << "\n";
    out << "cusps       " << inv.cusp_count << "\n";
    out << "genus       " << inv.genus << "\n";
    out << "components  " << inv.components << "\n";
  }
  report.text = out.str();
  return report;
}

// Image in GL2(Z/d) of a group known at level L: reduction when d | L,
// otherwise the full preimage of the image at gcd(d, L).
inline MatrixGroup image_at_modulus(const MatrixGroup& g, Modulus d) {
  const Modulus level = g.modulus();
  if (level % d == 0) return reduce_group(g, d);
  const Modulus common = std::gcd(level, d);
  const MatrixGroup base = reduce_group(g, common);
  return group_from_predicate(d, [&](const ZMatrix& m) { return base.contains(mat_reduce(m, common)); });
}

struct X0Level {
  Modulus n = 1;
  CurveInvariants invariants;
  std::vector<ClosedPointClass> points;  // empty without generators
};

struct X0Analysis {
  Rational j_invariant;
  Modulus sl_level = 1;
  std::optional<MatrixGroup> image;
  std::vector<X0Level> levels;
  std::optional<Modulus> minimal_positive_genus;
};

// Genus data of X_0(d) for each d | sl_level, plus the points above j when
// the Galois image is known.
inline X0Analysis analyse_x0(const Rational& j, Modulus sl, const std::optional<MatrixGroup>& image) {
  X0Analysis result;
  result.j_invariant = j;
  result.sl_level = sl;
  result.image = image;
  for (Modulus d : divisors(sl)) {
    X0Level entry;
    entry.n = d;
    const MatrixGroup b0 = borel(d);
    entry.invariants = genus(b0);
    if (image) {
      const MatrixGroup g = image_at_modulus(*image, d);
      entry.points = closed_points_over_j(b0, g);
    }
    if (entry.invariants.genus > 0 && !result.minimal_positive_genus) result.minimal_positive_genus = d;
    result.levels.push_back(std::move(entry));
  }
  return result;
}

inline Report cmd_x0(const std::string& j_text, const RunConfig& config) {
  Report report;
  const GaloisImageRecord bundled = level78_image();
  Rational j;
  if (j_text == "level78" || j_text == "61347.bb1") {
    j = bundled.j_invariant;
  } else {
    j = parse_rational(j_text);
  }
  const auto rows = exceptional_rows();
  const auto row = std::find_if(rows.begin(), rows.end(), [&](const ExceptionalJRow& r) { return r.j_invariant == j; });

  std::optional<MatrixGroup> image;
  std::optional<Modulus> sl;
  if (config.generators) {
    const GeneratorFile file = read_generator_file(*config.generators);
    image = closure(file.generators, file.modulus);
    if (!image->contains(ZMatrix::minus_identity(file.modulus))) {
      image = plus_minus(*image);
    }
    sl = sl_level(*image);
  } else if (j == bundled.j_invariant) {
    image = image_at_level(bundled, bundled.level);
  }
  if (row != rows.end()) {
    if (sl && *sl != row->sl_level) {
      report.warnings += "sl level of the supplied image (" + std::to_string(*sl) + ") differs from the table value (" +
                         std::to_string(row->sl_level) + ")\n";
    }
    if (!sl) sl = row->sl_level;
  }
  if (!sl) {
    std::ostringstream msg;
    msg << "j = " << display_rational(j) << " is not in the exceptional table and no --generators file was given.\n"
        << "available j-invariants:\n";
    for (const auto& r : rows) msg << "  " << display_rational(r.j_invariant) << "\n";
    report.ok = false;
    report.warnings += msg.str();
    return report;
  }

  const X0Analysis analysis = analyse_x0(j, *sl, image);
  std::ostringstream out;
  if (config.format == OutputFormat::Json) {
    Json levels = Json::array();
    for (const auto& l : analysis.levels) {
      Json entry = {{"n", l.n}, {"genus", l.invariants.genus}, {"components", l.invariants.components}};
      if (image) {
        Json pts = Json::array();
        for (const auto& p : l.points) {
          pts.push_back({{"rep", format_entries(p.coset.representative)},
                         {"degree", p.degree},
                         {"pruned", p.degree > l.invariants.components * l.invariants.genus}});
        }
        entry["points"] = pts;
      }
      levels.push_back(entry);
    }
    Json doc = {{"j_invariant", format_rational(j)},
                {"sl_level", *sl},
                {"image_known", image.has_value()},
                {"levels", levels},
                {"minimal_positive_genus", analysis.minimal_positive_genus ? Json(*analysis.minimal_positive_genus)
                                                                           : Json(nullptr)}};
    out << doc.dump(2) << "\n";
  } else if (config.format == OutputFormat::Csv) {
    out << "n;genus;components;degree;count;pruned\n";
    for (const auto& l : analysis.levels) {
      std::map<std::size_t, std::size_t> by_degree;
      for (const auto& p : l.points) ++by_degree[p.degree];
      if (by_degree.empty()) out << l.n << ";" << l.invariants.genus << ";" << l.invariants.components << ";;;\n";
      for (const auto& [deg, count] : by_degree) {
        out << l.n << ";" << l.invariants.genus << ";" << l.invariants.components << ";" << deg << ";" << count << ";"
            << (deg > l.invariants.components * l.invariants.genus ? 1 : 0) << "\n";
      }
    }
  } else {
    out << "j = " << display_rational(j) << ", sl level " << *sl;
    if (image) out << ", Galois image of order " << image->order() << " at level " << image->modulus();
    out << "\n";
    for (const auto& l : analysis.levels) {
      out << "X_0(" << l.n << "): genus " << l.invariants.genus << ", components " << l.invariants.components;
      if (image) {
        std::map<std::size_t, std::size_t> by_degree;
        bool all_pruned = true;
        for (const auto& p : l.points) {
          ++by_degree[p.degree];
          all_pruned = all_pruned && p.degree > l.invariants.components * l.invariants.genus;
        }
        out << ", points above j:";
        for (const auto& [deg, count] : by_degree) out << " " << count << " of degree " << deg << ";";
        out << (all_pruned ? " all P1-parametrized" : " some not excluded by Riemann-Roch");
      }
      out << "\n";
    }
    if (analysis.minimal_positive_genus) {
      out << "smallest divisor with positive genus: " << *analysis.minimal_positive_genus << "\n";
    } else {
      out << "every X_0(d) with d | " << *sl << " has genus 0\n";
    }
  }
  report.text = out.str();
  return report;
}

}  // namespace modcurve
