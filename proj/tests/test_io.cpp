#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "modcurve/galois.hpp"
#include "modcurve/io.hpp"

using namespace modcurve;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("modcurve_io_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void expect_same(const SubgroupLattice& a, const SubgroupLattice& b) {
  ASSERT_EQ(a.size(), b.size());
  EXPECT_EQ(a.modulus(), b.modulus());
  for (std::size_t s = 0; s < a.size(); ++s) {
    EXPECT_EQ(a.subgroup(s), b.subgroup(s));
    EXPECT_EQ(a.subgroup(s).generators(), b.subgroup(s).generators());
    EXPECT_EQ(a.conjugator(s), b.conjugator(s));
    EXPECT_EQ(a.class_of(s), b.class_of(s));
  }
  ASSERT_EQ(a.classes().size(), b.classes().size());
  for (std::size_t c = 0; c < a.classes().size(); ++c) EXPECT_EQ(a.classes()[c].normalizer, b.classes()[c].normalizer);
  EXPECT_EQ(a.maximal_inclusions(), b.maximal_inclusions());
}

}  // namespace

TEST(LatticeCache, JsonRoundTrip) {
  for (Modulus n : {1u, 2u, 5u, 6u}) {
    const auto lattice = enumerate_subgroups_containing_minus_I(n);
    const Json doc = lattice_to_json(lattice);
    EXPECT_EQ(doc.at("format_version"), kLatticeCacheVersion);
    expect_same(lattice_from_json(Json::parse(doc.dump())), lattice);
  }
}

TEST(LatticeCache, SecondLoadComesFromCache) {
  const fs::path dir = fresh_dir("reuse");
  const auto first = cached_lattice(5, dir);
  EXPECT_FALSE(first.from_cache);
  EXPECT_TRUE(first.warning.empty());
  EXPECT_TRUE(fs::exists(lattice_cache_path(dir, 5)));
  const auto second = cached_lattice(5, dir);
  EXPECT_TRUE(second.from_cache);
  expect_same(*first.lattice, *second.lattice);
  fs::remove_all(dir);
}

TEST(LatticeCache, CorruptionRebuildsWithWarning) {
  const fs::path dir = fresh_dir("corrupt");
  cached_lattice(4, dir);
  const fs::path path = lattice_cache_path(dir, 4);
  Json doc = Json::parse(std::ifstream(path));
  doc["payload"]["conjugators"][1] = 0;
  std::ofstream(path) << doc.dump();
  const auto load = cached_lattice(4, dir);
  EXPECT_FALSE(load.from_cache);
  EXPECT_NE(load.warning.find("checksum"), std::string::npos);
  expect_same(*load.lattice, enumerate_subgroups_containing_minus_I(4));
  EXPECT_TRUE(cached_lattice(4, dir).from_cache);

  std::ofstream(path) << "{ not json";
  const auto garbage = cached_lattice(4, dir);
  EXPECT_FALSE(garbage.from_cache);
  EXPECT_FALSE(garbage.warning.empty());
  fs::remove_all(dir);
}

TEST(LatticeCache, OtherVersionRebuildsSilently) {
  const fs::path dir = fresh_dir("version");
  cached_lattice(3, dir);
  const fs::path path = lattice_cache_path(dir, 3);
  Json doc = Json::parse(std::ifstream(path));
  doc["format_version"] = kLatticeCacheVersion + 1;
  std::ofstream(path) << doc.dump();
  const auto load = cached_lattice(3, dir);
  EXPECT_FALSE(load.from_cache);
  EXPECT_TRUE(load.warning.empty());
  EXPECT_EQ(Json::parse(std::ifstream(path)).at("format_version"), kLatticeCacheVersion);
  fs::remove_all(dir);
}

TEST(LatticeCache, InconsistentPayloadIsRejected) {
  Json doc = lattice_to_json(enumerate_subgroups_containing_minus_I(3));
  doc["payload"]["classes"][0]["members"] = Json::array();
  doc["checksum"] = detail::payload_checksum(doc["payload"]);
  EXPECT_THROW(lattice_from_json(doc), DataError);
  Json missing = lattice_to_json(enumerate_subgroups_containing_minus_I(3));
  missing["payload"].erase("subgroups");
  missing["checksum"] = detail::payload_checksum(missing["payload"]);
  EXPECT_THROW(lattice_from_json(missing), DataError);
}

TEST(JsonShapes, CurveInvariantsAndPoints) {
  const MatrixGroup h = borel(7);
  const Json j = to_json(genus(h), closed_points_over_j(h, mod7_image("G1")));
  EXPECT_EQ(j.at("level"), 7);
  EXPECT_EQ(j.at("genus"), 0);
  EXPECT_EQ(j.at("components"), 1);
  EXPECT_EQ(j.at("sl2_index"), 8);
  EXPECT_FALSE(j.at("points").empty());
  for (const auto& p : j.at("points")) {
    EXPECT_TRUE(p.contains("rep"));
    EXPECT_TRUE(p.contains("degree"));
  }
}

TEST(JsonShapes, Graph) {
  IsolationGraph g;
  g.level = 7;
  g.j_invariant = level7_j_invariant();
  g.vertices.resize(2);
  g.edges.push_back({0, 1, kPullback | kPushforward, {}});
  g.pruned = {true, false};
  const Json j = to_json(g);
  EXPECT_EQ(j.at("j_invariant"), "2268945/128");
  EXPECT_EQ(j.at("graph"), "full");
  EXPECT_EQ(j.at("vertex_count"), 2);
  EXPECT_EQ(j.at("pruned_count"), 1);
  EXPECT_EQ(j.at("edges")[0].at("kind"), "pullback+pushforward");
  EXPECT_EQ(j.at("vertices")[0].at("pruned"), true);
}
