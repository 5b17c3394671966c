#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "modcurve/curves.hpp"
#include "modcurve/galois.hpp"

using namespace modcurve;

namespace {

std::string data_file_text() {
  std::ifstream in(data_directory() / "exceptional_j.txt");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const ExceptionalJRow& row_for(const std::vector<ExceptionalJRow>& rows, const std::string& j) {
  const Rational value = parse_rational(j);
  for (const auto& r : rows)
    if (r.j_invariant == value) return r;
  throw std::runtime_error("missing row " + j);
}

bool det_surjective(const MatrixGroup& g) {
  std::set<std::uint32_t> dets;
  for (const auto& m : g.elements()) dets.insert(m.det_value());
  return dets.size() == euler_phi(g.modulus());
}

}  // namespace

TEST(Mod7Images, OrdersAndBasicShape) {
  const std::map<std::string, std::size_t> expected{{"G1", 36},  {"G2", 72},  {"G3", 84},   {"G4", 84},
                                                     {"G5", 84}, {"G6", 96},  {"G7", 252}, {"G8", 2016}};
  for (const auto& label : mod7_labels()) {
    const MatrixGroup g = mod7_image(label);
    EXPECT_EQ(g.modulus(), 7u);
    EXPECT_EQ(g.order(), expected.at(label)) << label;
    EXPECT_TRUE(g.contains(ZMatrix::minus_identity(7))) << label;
    EXPECT_TRUE(det_surjective(g)) << label;
  }
  EXPECT_EQ(mod7_image("G7"), borel(7));
  EXPECT_THROW(mod7_image("G9"), Error);
}

TEST(Mod7Images, LaterImagesHaveGenusZero) {
  for (const char* label : {"G2", "G3", "G4", "G5", "G6", "G7", "G8"}) {
    const auto inv = genus(mod7_image(label));
    EXPECT_EQ(inv.genus, 0u) << label;
    EXPECT_EQ(inv.components, 1u) << label;
  }
}

TEST(Level78, RecordAndReductions) {
  const auto rec = level78_image();
  EXPECT_EQ(format_rational(rec.j_invariant), "-160855552000/1594323");
  EXPECT_EQ(rec.level, 78u);
  EXPECT_EQ(rec.generators.size(), 8u);
  const MatrixGroup g = image_at_level(rec, 78);
  EXPECT_TRUE(g.contains(ZMatrix::minus_identity(78)));
  EXPECT_TRUE(det_surjective(g));
  EXPECT_EQ(sl_level(g), 26u);
  EXPECT_EQ(sl_level(g), rec.sl_level);
  EXPECT_EQ(image_at_level(rec, 1).order(), 1u);
  const MatrixGroup g26 = image_at_level(rec, 26);
  EXPECT_EQ(g26, reduce_group(g, 26));
  EXPECT_THROW(image_at_level(rec, 5), NotDivisor);
}

TEST(SlLevel, StandardGroups) {
  EXPECT_EQ(sl_level(full_group(12)), 1u);
  EXPECT_EQ(sl_level(borel(7)), 7u);
  EXPECT_EQ(sl_level(plus_minus_identity(6)), 6u);
  EXPECT_EQ(divisors(12), (std::vector<Modulus>{1, 2, 3, 4, 6, 12}));
}

TEST(ExceptionalTable, RowsAndSpotValues) {
  const auto rows = exceptional_rows();
  EXPECT_EQ(rows.size(), 81u);
  std::set<Rational> unique;
  for (const auto& r : rows) unique.insert(r.j_invariant);
  EXPECT_EQ(unique.size(), 81u);

  const auto& a = row_for(rows, "-9317");
  EXPECT_EQ(a.agreeable_level, 37u);
  EXPECT_EQ(a.agreeable_index, 38u);
  EXPECT_EQ(a.agreeable_genus, 2u);
  EXPECT_EQ(a.sl_level, 74u);
  const auto& b = row_for(rows, "3375/2");
  EXPECT_EQ(b.agreeable_level, 168u);
  EXPECT_EQ(b.agreeable_index, 64u);
  EXPECT_EQ(b.agreeable_genus, 3u);
  EXPECT_EQ(b.sl_level, 42u);
  EXPECT_EQ(row_for(rows, "-160855552000/1594323").sl_level, 26u);
}

TEST(ExceptionalTable, IsolatedX0JInvariantsAreTabulated) {
  const auto rows = exceptional_rows();
  for (const char* j : {"-121", "-24729001", "-25/2", "-121945/32", "46969655/32768", "-349938025/8", "-297756989/2",
                        "-882216989/131072", "3375/2", "-140625/8", "-1159088625/2097152", "-189613868625/128", "-9317",
                        "-162677523113838677"}) {
    EXPECT_NO_THROW(row_for(rows, j)) << j;
  }
}

TEST(ExceptionalTable, TamperedDataIsRejected) {
  const std::string text = data_file_text();
  ASSERT_FALSE(text.empty());
  {
    std::istringstream in(text);
    EXPECT_EQ(parse_exceptional_rows(in).size(), 81u);
  }
  std::string tampered = text;
  const auto pos = tampered.find("-9317/1;37;38;2;74");
  ASSERT_NE(pos, std::string::npos);
  tampered.replace(pos, 18, "-9317/1;37;38;2;37");
  std::istringstream bad(tampered);
  EXPECT_THROW(parse_exceptional_rows(bad), DataError);

  std::string versioned = text;
  versioned.replace(versioned.find("format_version 1"), 16, "format_version 9");
  std::istringstream future(versioned);
  EXPECT_THROW(parse_exceptional_rows(future), DataError);

  std::istringstream short_row("# format_version 1\n1/1;2;3\n");
  EXPECT_THROW(parse_exceptional_rows(short_row), DataError);
  EXPECT_THROW(exceptional_rows("/nonexistent/exceptional_j.txt"), DataError);
}

TEST(Checksum, KnownVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cull);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ull);
}
