#pragma once

// Text forms of matrices and groups.
//
//   matrix:  [[a,b],[c,d]] mod n        (entries are arbitrary integers)
//   group:   <[[a,b],[c,d]],[[e,f],[g,h]] mod n>
//   builtin: GL2(n), SL2(n), B0(n), B1(n), PM(n), G1..G8
//
// Generator files hold a `mod n` line followed by one matrix per line, with
// `#` starting a comment.

#include <cctype>
#include <cstdint>
#include <fstream>
#include <filesystem>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "modcurve/error.hpp"
#include "modcurve/galois.hpp"
#include "modcurve/group.hpp"
#include "modcurve/zmatrix.hpp"

namespace modcurve {

inline std::string format_entries(const ZMatrix& m) {
  return "[[" + std::to_string(m.a()) + "," + std::to_string(m.b()) + "],[" + std::to_string(m.c()) + "," +
         std::to_string(m.d()) + "]]";
}

inline std::string format_matrix(const ZMatrix& m) {
  return format_entries(m) + " mod " + std::to_string(m.modulus());
}

// Uses the stored generators, or the element list if there are none.
inline std::string format_group(const MatrixGroup& g) {
  const ElementList& gens = g.generators().empty() ? g.elements() : g.generators();
  std::string out = "<";
  for (std::size_t i = 0; i < gens.size(); ++i) {
    if (i) out += ",";
    out += format_entries(gens[i]);
  }
  return out + " mod " + std::to_string(g.modulus()) + ">";
}

namespace detail {

class Cursor {
 public:
  explicit Cursor(std::string_view text, std::size_t offset = 0) : text_(text), offset_(offset) {}

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }
  bool peek(char c) {
    skip_space();
    return pos_ < text_.size() && text_[pos_] == c;
  }
  bool accept(char c) {
    if (!peek(c)) return false;
    ++pos_;
    return true;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }
  bool accept_word(std::string_view word) {
    skip_space();
    if (text_.substr(pos_, word.size()) != word) return false;
    const std::size_t end = pos_ + word.size();
    if (end < text_.size() && std::isalnum(static_cast<unsigned char>(text_[end]))) return false;
    pos_ = end;
    return true;
  }
  std::int64_t integer() {
    skip_space();
    const std::size_t start = pos_;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
    const std::size_t digits = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == digits || pos_ - digits > 18) {
      pos_ = start;
      fail("expected an integer");
    }
    return std::stoll(std::string(text_.substr(start, pos_ - start)));
  }
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, offset_ + pos_); }

 private:
  std::string_view text_;
  std::size_t offset_;
  std::size_t pos_ = 0;
};

struct RawMatrix {
  std::int64_t e[4];
};

inline RawMatrix raw_matrix(Cursor& in) {
  RawMatrix m{};
  in.expect('[');
  for (int row = 0; row < 2; ++row) {
    if (row) in.expect(',');
    in.expect('[');
    m.e[2 * row] = in.integer();
    in.expect(',');
    m.e[2 * row + 1] = in.integer();
    in.expect(']');
  }
  in.expect(']');
  return m;
}

inline Modulus modulus_clause(Cursor& in) {
  if (!in.accept_word("mod")) in.fail("expected 'mod'");
  const std::int64_t n = in.integer();
  if (n < 1 || n > kMaxModulus) in.fail("modulus out of range");
  return static_cast<Modulus>(n);
}

inline ZMatrix build(const RawMatrix& m, Modulus n) { return ZMatrix(m.e[0], m.e[1], m.e[2], m.e[3], n); }

}  // namespace detail

inline ZMatrix parse_matrix(std::string_view text) {
  detail::Cursor in(text);
  const auto raw = detail::raw_matrix(in);
  const Modulus n = detail::modulus_clause(in);
  if (!in.at_end()) in.fail("trailing characters");
  return detail::build(raw, n);
}

// Group literal or builtin name.
inline MatrixGroup parse_group(std::string_view text) {
  detail::Cursor in(text);
  if (in.accept('<')) {
    std::vector<detail::RawMatrix> raws;
    if (!in.peek('m')) {
      do {
        raws.push_back(detail::raw_matrix(in));
      } while (in.accept(','));
    }
    in.accept(']');  // tolerated stray bracket before the modulus
    const Modulus n = detail::modulus_clause(in);
    in.expect('>');
    if (!in.at_end()) in.fail("trailing characters");
    ElementList gens;
    for (const auto& r : raws) gens.push_back(detail::build(r, n));
    for (std::size_t i = 0; i < gens.size(); ++i) {
      if (!gens[i].is_invertible()) throw ParseError("generator " + std::to_string(i + 1) + " is not invertible", 0);
    }
    return closure(gens, n);
  }
  for (const auto& label : mod7_labels()) {
    if (in.accept_word(label)) {
      if (!in.at_end()) in.fail("trailing characters");
      return mod7_image(label);
    }
  }
  struct Builtin {
    std::string_view name;
    MatrixGroup (*make)(Modulus);
  };
  static const Builtin builtins[] = {
      {"GL2", full_group},
      {"SL2", special_linear_group},
      {"B0", [](Modulus n) { return borel(n); }},
      {"B1", [](Modulus n) { return borel1(n, false); }},
      {"PM", plus_minus_identity},
  };
  for (const auto& b : builtins) {
    if (in.accept_word(b.name)) {
      in.expect('(');
      const std::int64_t n = in.integer();
      if (n < 1 || n > kMaxModulus) in.fail("modulus out of range");
      in.expect(')');
      if (!in.at_end()) in.fail("trailing characters");
      return b.make(static_cast<Modulus>(n));
    }
  }
  in.fail("expected a group literal '<...>' or one of GL2(n), SL2(n), B0(n), B1(n), PM(n), G1..G8");
}

struct GeneratorFile {
  Modulus modulus = 1;
  ElementList generators;
};

inline GeneratorFile parse_generator_file(std::istream& in) {
  GeneratorFile file;
  std::optional<Modulus> n;
  std::string line;
  std::size_t offset = 0;
  while (std::getline(in, line)) {
    const std::size_t line_offset = offset;
    offset += line.size() + 1;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    detail::Cursor cur(line, line_offset);
    if (cur.at_end()) continue;
    if (!n) {
      n = detail::modulus_clause(cur);
      if (!cur.at_end()) cur.fail("trailing characters");
      continue;
    }
    const auto raw = detail::raw_matrix(cur);
    if (!cur.at_end()) {
      if (detail::modulus_clause(cur) != *n) cur.fail("matrix modulus differs from the file header");
      if (!cur.at_end()) cur.fail("trailing characters");
    }
    file.generators.push_back(detail::build(raw, *n));
  }
  if (!n) throw ParseError("generator file has no 'mod n' header", 0);
  file.modulus = *n;
  return file;
}

inline GeneratorFile read_generator_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return parse_generator_file(in);
}

}  // namespace modcurve
