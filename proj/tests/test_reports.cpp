#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "heatlab/norms.hpp"
#include "heatlab/reports.hpp"

using namespace heatlab;

namespace {
std::filesystem::path fresh_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

const char* kEmbedCfg =
    "[experiment]\nkind = embedding\n"
    "[grid]\nd = 1\nN = 2048\nL = 8.0\n"
    "[params]\nA = 3\np = 2.0\nK = 5\n"
    "[input]\ngenerator = near_delta\nsigma = 0.02\n";
}  // namespace

TEST_CASE("embedding report: partial sums are increasing and scaled by l1") {
  GridSpec g = make_grid(1, 2048, 8.0);
  Field f = gen_near_delta(g, 0.02, {1.0});
  HeatLadder ladder = build_ladder(f, 3, 5);
  EmbeddingReport rep = embedding_report(ladder, ProofParameters::defaults(1, 3, 2.0, 5));
  CHECK(rep.l1 == doctest::Approx(lp_norm(f, 1.0)));
  REQUIRE(rep.terms.size() == 6);
  for (std::size_t k = 1; k < rep.partial.size(); ++k) {
    CHECK(rep.partial[k] >= rep.partial[k - 1]);
    CHECK(rep.ratio[k] == doctest::Approx(rep.partial[k] / rep.l1));
  }
}

TEST_CASE("run_experiment writes csv outputs and a manifest") {
  LabConfig cfg = LabConfig::parse_string(kEmbedCfg);
  auto out = fresh_dir("heatlab_rep_run");
  run_experiment(cfg, out, 42);
  CHECK(std::filesystem::exists(out / "embedding.csv"));
  CHECK(std::filesystem::exists(out / "manifest.txt"));
  std::string man = slurp(out / "manifest.txt");
  CHECK(man.find("seed") != std::string::npos);
  CHECK(man.find("embedding.csv") != std::string::npos);
}

TEST_CASE("identical configs give byte-identical outputs") {
  LabConfig cfg = LabConfig::parse_string(kEmbedCfg);
  auto out1 = fresh_dir("heatlab_rep_a");
  auto out2 = fresh_dir("heatlab_rep_b");
  run_experiment(cfg, out1, 42);
  run_experiment(cfg, out2, 42);
  CHECK(slurp(out1 / "embedding.csv") == slurp(out2 / "embedding.csv"));
  CHECK(slurp(out1 / "manifest.txt") == slurp(out2 / "manifest.txt"));
}

TEST_CASE("unknown experiment kind is a config error") {
  LabConfig cfg = LabConfig::parse_string("[experiment]\nkind = nonsense\n");
  CHECK_THROWS_AS(run_experiment(cfg, fresh_dir("heatlab_rep_bad"), 1), config_error);
}

TEST_CASE("violated tolerance surfaces as an assertion error") {
  std::string cfg_text = std::string(kEmbedCfg) + "[tolerances]\nmax_ratio_spread = 1.000001\nspread_from_k = 0\n";
  LabConfig cfg = LabConfig::parse_string(cfg_text);
  // a near-delta keeps growing, so a spread bound of ~1 from k = 0 must trip
  CHECK_THROWS_AS(run_experiment(cfg, fresh_dir("heatlab_rep_trip"), 1), assertion_error);
}

TEST_CASE("convex sum report covers the grid consistently") {
  GridSpec g = make_grid(1, 2048, 8.0);
  Field f = gen_dipole(g, 0.1, 0.5);
  HeatLadder ladder = build_ladder(f, 3, 5);
  ProofParameters pp = ProofParameters::defaults(1, 3, 2.0, 5);
  AtomTable table = build_atom_table(ladder, pp);
  ConvexSumReport rep = convex_sum_report(ladder, table);
  for (const ConvexSumRow& row : rep.rows) {
    CHECK(row.coverage >= 0.0);
    CHECK(row.coverage <= 1.0);
    CHECK(row.term >= 0.0);
  }
}

TEST_CASE("tree budget rows are consistent with the forest") {
  GridSpec g = make_grid(1, 2048, 8.0);
  Field f = gen_near_delta(g, 0.02, {1.0});
  HeatLadder ladder = build_ladder(f, 3, 5);
  ProofParameters pp = ProofParameters::defaults(1, 3, 2.0, 5);
  AtomTable table = build_atom_table(ladder, pp);
  std::vector<HorizontalGraph> graphs;
  for (const AtomLevel& lvl : table.levels)
    graphs.push_back(build_horizontal_graph(lvl, pp.lambda(), pp.theta4));
  VerticalForest forest = build_vertical_forest(table, graphs);
  auto rows = tree_budget_report(ladder, table, forest);
  CHECK(rows.size() == forest.roots.size());
  for (const auto& row : rows) {
    CHECK(row.size >= 1);
    CHECK(row.depth >= 0);
    CHECK(row.budget >= 0.0);
  }
}
