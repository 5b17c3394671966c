#pragma once

// Galois-image data: the mod-7 images G1..G8, the explicit level-78 image and
// the table of exceptional rational j-invariants.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "modcurve/error.hpp"
#include "modcurve/group.hpp"
#include "modcurve/rational.hpp"
#include "modcurve/zmatrix.hpp"

#ifndef MODCURVE_DATA_DIR
#define MODCURVE_DATA_DIR "data"
#endif

namespace modcurve {

// j = 3^3 * 5 * 7^5 / 2^7
inline Rational level7_j_invariant() { return Rational(BigInt(27 * 5) * 16807, BigInt(128)); }

inline MatrixGroup mod7_image(std::string_view label) {
  constexpr Modulus n = 7;
  if (label == "G1") return closure({ZMatrix(2, 0, 0, 4, n), ZMatrix(0, 2, 1, 0, n), ZMatrix::minus_identity(n)}, n);
  if (label == "G2") {
    return group_from_predicate(n, [](const ZMatrix& m) {
      return (m.b() == 0 && m.c() == 0) || (m.a() == 0 && m.d() == 0);
    });
  }
  if (label == "G3") {
    return group_from_predicate(n, [](const ZMatrix& m) { return m.c() == 0 && (m.a() == 1 || m.a() == 6); });
  }
  if (label == "G4") {
    return group_from_predicate(n, [](const ZMatrix& m) { return m.c() == 0 && (m.d() == 1 || m.d() == 6); });
  }
  if (label == "G5") {
    return group_from_predicate(n, [](const ZMatrix& m) { return m.c() == 0 && (m.d() == m.a() || m.d() == (7 - m.a()) % 7); });
  }
  if (label == "G6") {
    return group_from_predicate(n, [](const ZMatrix& m) {
      const bool rotation = m.a() == m.d() && m.b() == (7 - m.c()) % 7;
      const bool reflection = m.b() == m.c() && m.d() == (7 - m.a()) % 7;
      return rotation || reflection;
    });
  }
  if (label == "G7") return borel(n);
  if (label == "G8") return full_group(n);
  throw Error("unknown mod-7 image label '" + std::string(label) + "' (expected G1..G8)");
}

inline const std::vector<std::string>& mod7_labels() {
  static const std::vector<std::string> labels{"G1", "G2", "G3", "G4", "G5", "G6", "G7", "G8"};
  return labels;
}

struct GaloisImageRecord {
  Rational j_invariant;
  Modulus level = 1;
  ElementList generators;
  Modulus sl_level = 1;
  std::string notes;
};

inline GaloisImageRecord level78_image() {
  constexpr Modulus n = 78;
  GaloisImageRecord rec;
  rec.j_invariant = Rational(BigInt(-160855552000LL), BigInt(1594323));
  rec.level = n;
  rec.generators = {ZMatrix(27, 14, 64, 39, n), ZMatrix(27, 26, 52, 27, n), ZMatrix(31, 52, 9, 47, n),
                    ZMatrix(73, 38, 44, 71, n), ZMatrix(53, 0, 0, 53, n),   ZMatrix(1, 0, 52, 1, n),
                    ZMatrix(14, 39, 13, 53, n), ZMatrix(65, 72, 48, 65, n)};
  rec.sl_level = 26;
  rec.notes = "elliptic curve 61347.bb1";
  return rec;
}

// Closure of the generators reduced mod m.
inline MatrixGroup image_at_level(const GaloisImageRecord& rec, Modulus m) {
  if (m == 0 || rec.level % m != 0) throw NotDivisor(m, rec.level);
  ElementList reduced;
  for (const auto& g : rec.generators) reduced.push_back(mat_reduce(g, m));
  return closure(reduced, m);
}

inline std::vector<Modulus> divisors(Modulus n) {
  std::vector<Modulus> out;
  for (Modulus d = 1; d <= n; ++d)
    if (n % d == 0) out.push_back(d);
  return out;
}

// Smallest d | n such that G contains every element of SL2(Z/n) that is
// trivial mod d, i.e. the level of G ∩ SL2 computed at level n.
inline Modulus sl_level(const MatrixGroup& g) {
  const Modulus n = g.modulus();
  const MatrixGroup sl = special_linear_group(n);
  for (Modulus d : divisors(n)) {
    bool contained = true;
    for (const auto& x : sl.elements()) {
      if (mat_reduce(x, d) == ZMatrix::identity(d) && !g.contains(x)) {
        contained = false;
        break;
      }
    }
    if (contained) return d;
  }
  return n;
}

struct ExceptionalJRow {
  Rational j_invariant;
  std::uint32_t agreeable_level = 1;
  std::uint32_t agreeable_index = 1;
  std::uint32_t agreeable_genus = 0;
  std::uint32_t sl_level = 1;
};

inline constexpr int kExceptionalDataVersion = 1;

inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Directory holding bundled data; MODCURVE_DATA_DIR in the environment wins.
inline std::filesystem::path data_directory() {
  if (const char* env = std::getenv("MODCURVE_DATA_DIR"); env && *env) return env;
  return MODCURVE_DATA_DIR;
}

inline std::vector<ExceptionalJRow> parse_exceptional_rows(std::istream& in) {
  std::vector<ExceptionalJRow> rows;
  std::set<Rational> seen;
  std::string line;
  std::uint64_t hash = 0xcbf29ce484222325ull;
  std::string declared_checksum;
  int version = -1;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::istringstream words(line.substr(1));
      std::string key;
      words >> key;
      if (key == "format_version") {
        words >> version;
      } else if (key == "checksum") {
        std::string algorithm;
        words >> algorithm >> declared_checksum;
        if (algorithm != "fnv1a64") throw DataError("unsupported checksum algorithm '" + algorithm + "'");
      }
      continue;
    }
    hash = fnv1a64(line, hash);
    hash = fnv1a64("\n", hash);
    auto fail = [&](const std::string& why) {
      return DataError("exceptional j data line " + std::to_string(line_no) + ": " + why);
    };
    std::vector<std::string> fields;
    std::istringstream parts(line);
    for (std::string f; std::getline(parts, f, ';');) fields.push_back(f);
    if (fields.size() != 5) throw fail("expected 5 fields");
    ExceptionalJRow row;
    try {
      row.j_invariant = parse_rational(fields[0]);
      auto number = [](const std::string& s) {
        std::size_t used = 0;
        const unsigned long v = std::stoul(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return static_cast<std::uint32_t>(v);
      };
      row.agreeable_level = number(fields[1]);
      row.agreeable_index = number(fields[2]);
      row.agreeable_genus = number(fields[3]);
      row.sl_level = number(fields[4]);
    } catch (const ParseError& e) {
      throw fail(e.what());
    } catch (const std::exception&) {
      throw fail("malformed integer field");
    }
    if (row.agreeable_level == 0 || row.agreeable_index == 0 || row.sl_level == 0) throw fail("zero field");
    if (!seen.insert(row.j_invariant).second) throw fail("duplicate j-invariant");
    rows.push_back(std::move(row));
  }
  if (version != kExceptionalDataVersion) throw DataError("exceptional j data: unsupported format_version");
  std::ostringstream actual;
  actual << std::hex;
  actual.width(16);
  actual.fill('0');
  actual << hash;
  if (declared_checksum != actual.str()) {
    throw DataError("exceptional j data: checksum mismatch (declared " + declared_checksum + ", computed " +
                    actual.str() + ")");
  }
  return rows;
}

inline std::vector<ExceptionalJRow> exceptional_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return parse_exceptional_rows(in);
}

inline std::vector<ExceptionalJRow> exceptional_rows() {
  return exceptional_rows(data_directory() / "exceptional_j.txt");
}

}  // namespace modcurve
