//
// SPDX-License-Identifier: Apache-2.0
//

#include "rxngrow/reward_oracles.h"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "rxngrow/errors.h"
#include "rxngrow/util/io.h"
#include "test_support.h"

namespace rxngrow {
namespace {

using testing::TempDir;
using testing::write_script;

TEST(Reward, WorkedExample) {
  const RewardBreakdown b = scalarize({9.3, 0.3, 3.0, 1.0}, RewardWeights{});
  EXPECT_DOUBLE_EQ(b.total, 9.38);
  EXPECT_DOUBLE_EQ(b.affinity_component, 9.3);
  EXPECT_DOUBLE_EQ(b.sa_component, 3.0);
}

TEST(Reward, LinearInWeights) {
  const RewardComponents c{8.0, 0.5, 2.5, 0.0};
  const RewardBreakdown a = scalarize(c, {1, 0, 0, 0});
  const RewardBreakdown s = scalarize(c, {0, 0, 1, 0});
  EXPECT_DOUBLE_EQ(a.total, 8.0);
  EXPECT_DOUBLE_EQ(s.total, -2.5);
}

TEST(Reward, Normalized) {
  const RewardBreakdown b = scalarize({6.0, 0.4, 5.5, 1.0}, {}, true);
  EXPECT_DOUBLE_EQ(b.total, 1.0 * 0.5 + 0.1 * 0.4 - 0.1 * 0.5 + 0.35 * 1.0);
  EXPECT_DOUBLE_EQ(scalarize({24.0, 0, 1, 0}, {}, true).total, 1.0);
}

TEST(Reward, SurrogateRangeAndOptimum) {
  NativeEngine e;
  const std::uint64_t seed = 1234;
  const int opt = surrogate_optimum(seed);
  EXPECT_GE(opt, 26);
  EXPECT_LE(opt, 36);
  std::string chain = "C";
  for (int n = 1; n <= 40; ++n, chain += "C") {
    const double s = surrogate_dock(parse_molecule(chain, e), seed);
    EXPECT_LE(s, 0.0);
    EXPECT_GE(s, -12.0);
    if (n == opt)
      EXPECT_DOUBLE_EQ(s, -12.0);
  }
}

TEST(Reward, ScoreCachePersists) {
  TempDir dir("scores");
  const std::string key = ScoreCache::key("T1", "CCO", 8);
  EXPECT_NE(key, ScoreCache::key("T1", "CCO", 16));
  EXPECT_NE(key, ScoreCache::key("T2", "CCO", 8));
  {
    ScoreCache c(dir.file("s.tsv"));
    c.put(key, -7.25);
  }
  ScoreCache c(dir.file("s.tsv"));
  EXPECT_EQ(c.get(key), -7.25);
  EXPECT_FALSE(c.get(ScoreCache::key("T1", "CCN", 8)).has_value());
}

class CountingOracle: public DockingOracle {
public:
  const std::string &target_id() const override { return id_; }
  int exhaustiveness() const override { return 8; }
  std::unique_ptr<DockingOracle> clone() const override {
    return std::make_unique<CountingOracle>();
  }
  double dock(const Molecule &m) override {
    ++calls;
    if (m.smiles() == "CCN")
      throw DockingFailure("no pose");
    return -9.0;
  }
  int calls = 0;

private:
  std::string id_ = "T";
};

TEST(Reward, DockingFailureBecomesZeroAffinity) {
  NativeEngine e;
  CountingOracle oracle;
  ScoreCache cache;
  ReferenceSet ref;
  ref.insert("CCO");
  RewardContext ctx{&oracle, &cache, &ref, {}, false};
  Molecule ok = parse_molecule("CCO", e);
  const RewardBreakdown a = evaluate_reward(ok, e, ctx);
  EXPECT_DOUBLE_EQ(a.affinity_component, 9.0);
  EXPECT_DOUBLE_EQ(a.docked_score, -9.0);
  EXPECT_DOUBLE_EQ(a.novelty_component, 0.0);
  evaluate_reward(ok, e, ctx);
  EXPECT_EQ(oracle.calls, 1);  // cached

  Molecule bad = parse_molecule("CCN", e);
  const RewardBreakdown b = evaluate_reward(bad, e, ctx);
  EXPECT_TRUE(b.docking_failed);
  EXPECT_DOUBLE_EQ(b.affinity_component, 0.0);
  EXPECT_DOUBLE_EQ(b.novelty_component, 1.0);
  evaluate_reward(bad, e, ctx);
  EXPECT_EQ(oracle.calls, 3);  // failures are not cached
}

TEST(Reward, ParseDockingResult) {
  EXPECT_DOUBLE_EQ(parse_docking_result("MODEL 1\nREMARK VINA RESULT:    -8.4"
                                        "      0.000      0.000\n"),
                   -8.4);
  EXPECT_THROW(parse_docking_result("MODEL 1\n"), DockingFailure);
}

struct FakeTools {
  explicit FakeTools(const TempDir &dir) {
    // Converter: "{input} {output}" or "-:{smiles} {output}".
    converter = write_script(dir, "conv.sh",
                             "#!/bin/sh\necho converted > \"$2\"\n");
    vina = write_script(dir, "vina.sh",
                        "#!/bin/sh\n"
                        "while [ $# -gt 0 ]; do\n"
                        "  if [ \"$1\" = --out ]; then out=$2; fi\n"
                        "  shift\n"
                        "done\n"
                        "printf 'MODEL 1\\nREMARK VINA RESULT:    -8.7      "
                        "0.000      0.000\\n' > \"$out\"\n");
  }
  std::string converter;
  std::string vina;
};

ProteinTarget fixture_target(const TempDir &dir) {
  ProteinTarget t;
  t.target_id = "T";
  t.pdb_path = dir.file("t.pdb");
  write_file_atomic(t.pdb_path, "ATOM\n");
  t.box_center = {1, 2, 3};
  return t;
}

TEST(Docking, PrepareReceptorAndSkip) {
  TempDir dir("prep");
  FakeTools tools(dir);
  const ProteinTarget t = fixture_target(dir);
  ConverterConfig conv;
  conv.receptor_command = {tools.converter, "{input}", "{output}"};
  const ProteinTarget p = prepare_receptor(t, conv);
  ASSERT_TRUE(p.prepared_receptor.has_value());
  EXPECT_EQ(*p.prepared_receptor, dir.file("t.pdbqt"));
  // Up to date now, so the converter is not needed.
  conv.receptor_command = {dir.file("absent")};
  EXPECT_EQ(prepare_receptor(t, conv).prepared_receptor, p.prepared_receptor);
  EXPECT_THROW(prepare_receptor(t, conv, dir.file("other.pdbqt")),
               ToolNotFoundError);
  conv.receptor_command = {"/bin/false"};
  EXPECT_THROW(prepare_receptor(t, conv, dir.file("other.pdbqt")),
               ConversionError);
  ProteinTarget missing = t;
  missing.pdb_path = dir.file("none.pdb");
  EXPECT_THROW(prepare_receptor(missing, conv), FormatError);
  ProteinTarget bad_box = t;
  bad_box.box_size = {0, 10, 10};
  EXPECT_THROW(prepare_receptor(bad_box, conv), ConfigError);
}

TEST(Docking, SubprocessContract) {
  TempDir dir("dock");
  FakeTools tools(dir);
  ProteinTarget t = fixture_target(dir);
  t.prepared_receptor = dir.file("t.pdbqt");
  DockingConfig cfg;
  cfg.vina_binary = tools.vina;
  cfg.work_dir = dir.file("work");
  cfg.seed = 5;
  cfg.converter.ligand_command = {tools.converter, "-:{smiles}", "{output}"};
  SubprocessDockingOracle oracle(t, cfg);
  const auto argv = oracle.docking_command("l.pdbqt", "o.pdbqt");
  EXPECT_EQ(argv[0], tools.vina);
  EXPECT_NE(std::find(argv.begin(), argv.end(), "--exhaustiveness"),
            argv.end());
  NativeEngine e;
  const Molecule m = parse_molecule("CCO", e);
  EXPECT_DOUBLE_EQ(oracle.dock(m), -8.7);
  ScoreCache cache;
  EXPECT_DOUBLE_EQ(dock(m, oracle, cache), -8.7);
  EXPECT_EQ(cache.size(), 1u);

  cfg.vina_binary = "/bin/false";
  SubprocessDockingOracle failing(t, cfg);
  EXPECT_THROW(failing.dock(m), DockingFailure);
  cfg.vina_binary = dir.file("absent");
  SubprocessDockingOracle absent(t, cfg);
  EXPECT_THROW(absent.dock(m), DockingFailure);
  ProteinTarget unprepared = fixture_target(dir);
  EXPECT_THROW(SubprocessDockingOracle(unprepared, cfg), ConfigError);
}

TEST(Reward, ReferenceSetLoad) {
  TempDir dir("ref");
  NativeEngine e;
  write_file_atomic(dir.file("r.smi"), "OCC\nc1ccccc1 benzene\nnot-a-smiles(\n\n");
  const ReferenceSet r = ReferenceSet::load(dir.file("r.smi"), e);
  EXPECT_EQ(r.size(), 2u);
  EXPECT_EQ(r.skipped(), 1);
  EXPECT_EQ(novelty(parse_molecule("CCO", e), r), 0.0);
  EXPECT_EQ(novelty(parse_molecule("CCN", e), r), 1.0);
}

}  // namespace
}  // namespace rxngrow
