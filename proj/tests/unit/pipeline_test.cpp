//
// SPDX-License-Identifier: Apache-2.0
//

#include "rxngrow/pipeline.h"

#include <gtest/gtest.h>

#include <sstream>

#include "rxngrow/errors.h"
#include "rxngrow/util/io.h"
#include "rxngrow/util/subprocess.h"
#include "test_support.h"

namespace rxngrow {
namespace {

using testing::fixture;
using testing::TempDir;

TEST(Config, OverlayAndMirrorGamma) {
  RunConfig cfg;
  apply_config_json(cfg, nlohmann::json::parse(
                             R"({"episodes": 3, "env": {"gamma": 0.9},
                                 "weights": {"w4": 0.5}, "oracle": "docking"})"));
  EXPECT_EQ(cfg.episodes, 3);
  EXPECT_EQ(cfg.env.gamma, 0.9);
  EXPECT_EQ(cfg.ppo.gamma, 0.9);
  EXPECT_EQ(cfg.weights.w4, 0.5);
  EXPECT_EQ(cfg.weights.w1, 1.0);
  EXPECT_EQ(cfg.oracle, "docking");
  validate_run_config(cfg);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  RunConfig cfg;
  EXPECT_THROW(apply_config_json(cfg, nlohmann::json::parse(R"({"epsiodes": 3})")),
               ConfigError);
  EXPECT_THROW(
      apply_config_json(cfg, nlohmann::json::parse(R"({"ppo": {"lr": 1}})")),
      ConfigError);
  EXPECT_THROW(
      apply_config_json(cfg, nlohmann::json::parse(R"({"episodes": "five"})")),
      ConfigError);
  EXPECT_THROW(apply_config_json(cfg, nlohmann::json::parse(
                                          R"({"env": {"gamma": 0.9},
                                              "ppo": {"gamma": 0.8}})")),
               ConfigError);
  RunConfig bad;
  bad.episodes = 0;
  EXPECT_THROW(validate_run_config(bad), ConfigError);
  bad = RunConfig{};
  bad.oracle = "magic";
  EXPECT_THROW(validate_run_config(bad), ConfigError);
}

TEST(Config, JsonRoundTrip) {
  RunConfig cfg = load_run_config(fixture("run_config.json"));
  EXPECT_EQ(cfg.seed, 11u);
  RunConfig again;
  apply_config_json(again, nlohmann::json::parse(run_config_json(cfg).dump()));
  EXPECT_EQ(run_config_json(again).dump(), run_config_json(cfg).dump());
  EXPECT_THROW(load_run_config(fixture("absent.json")), FormatError);
}

TEST(Encoders, FallbackToStub) {
  TempDir dir("fallback");
  EncoderConfig ec{"batch", "ext", 16, {dir.file("absent")}, true};
  auto enc = make_encoder(ec, Modality::kMolecule, dir.file("w"));
  EXPECT_EQ(enc->spec().encoder_id, "stub-fallback/ext");
  EXPECT_EQ(enc->spec().dim, 16);
  ec.fallback_to_stub = false;
  auto strict = make_encoder(ec, Modality::kMolecule, dir.file("w"));
  EXPECT_THROW(strict->encode_batch({"CCO"}), EncoderUnavailableError);
}

// Builds kb and library into dir and returns a config pointing at them.
RunConfig prepared_config(const TempDir &dir) {
  RunConfig cfg = load_run_config(fixture("run_config.json"));
  cfg.kb_path = dir.file("kb.json");
  cfg.library_path = dir.file("lib.json");
  cfg.reference_path = fixture("reference.smi");
  cfg.workspace = dir.file("ws");
  std::ostringstream log;
  cmd_build_kb(cfg, {fixture("kb_index.tsv"), fixture("kb_ligands.tsv"), ""},
               log);
  cmd_build_templates(cfg, {fixture("rules.tsv"), ""}, log);
  return cfg;
}

TEST(Pipeline, InitTargetIsDeterministicAndClampsK) {
  TempDir dir("init");
  RunConfig cfg = prepared_config(dir);
  cfg.k = 2;
  std::ostringstream log;
  cmd_init_target(cfg, {"", fixture("target.fasta")}, log);
  const auto sim = read_lines(dir.file("ws/similarity.tsv"));
  EXPECT_EQ(sim.size(), 3u);  // header + top-2
  const std::string pool = read_file(dir.file("ws/pool.smi"));
  const std::string target = read_file(dir.file("ws/target.json"));
  EXPECT_EQ(nlohmann::json::parse(target)["target"]["target_id"], "TGT1");
  cmd_init_target(cfg, {"", fixture("target.fasta")}, log);
  EXPECT_EQ(read_file(dir.file("ws/pool.smi")), pool);
  EXPECT_EQ(read_file(dir.file("ws/target.json")), target);

  cfg.k = 50;
  std::ostringstream warn;
  cmd_init_target(cfg, {"", fixture("target.fasta")}, warn);
  EXPECT_NE(warn.str().find("warning"), std::string::npos);
  EXPECT_EQ(read_lines(dir.file("ws/similarity.tsv")).size(), 6u);
}

TEST(Pipeline, RunWritesAllArtifacts) {
  TempDir dir("run");
  RunConfig cfg = prepared_config(dir);
  cfg.episodes = 3;
  std::ostringstream log;
  cmd_init_target(cfg, {"", fixture("target.fasta")}, log);
  cmd_run(cfg, {}, log);
  for (const char *f: {workspace::kDiscoveries, workspace::kTrajectories,
                       workspace::kCheckpoint, workspace::kReportJson,
                       workspace::kReportCsv, workspace::kReportText,
                       workspace::kRunMeta})
    EXPECT_TRUE(file_exists(dir.file(std::string("ws/") + f))) << f;
  const auto meta =
      nlohmann::json::parse(read_file(dir.file("ws/run_meta.json")));
  EXPECT_EQ(meta.at("config").at("seed").get<int>(), 11);
  EXPECT_EQ(meta.at("episodes").size(), 3u);
  std::ostringstream out;
  ReportOptions ro;
  ro.format = "csv";
  cmd_report(cfg, ro, out, log);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), kMetricsColumns);
}

TEST(Pipeline, RunNeedsInitializedWorkspace) {
  TempDir dir("noinit");
  RunConfig cfg = prepared_config(dir);
  std::ostringstream log;
  EXPECT_THROW(cmd_run(cfg, {}, log), FormatError);
}

// The CLI binary, to check exit codes.
int cli(const std::vector<std::string> &args, std::string *err = nullptr) {
  std::vector<std::string> argv = {RXNGROW_CLI};
  argv.insert(argv.end(), args.begin(), args.end());
  const ProcessResult r = run_process(argv);
  if (err)
    *err = r.err;
  return r.exit_code;
}

TEST(Cli, ExitCodes) {
  TempDir dir("cli");
  std::string err;
  EXPECT_EQ(cli({"build-kb", "--index", dir.file("missing.tsv"), "--ligands",
                 fixture("kb_ligands.tsv"), "--out", dir.file("kb.json")},
                &err),
            2);
  EXPECT_NE(err.find("missing.tsv"), std::string::npos);
  EXPECT_EQ(cli({"build-kb", "--index", fixture("kb_index.tsv"), "--ligands",
                 fixture("kb_ligands.tsv"), "--out", dir.file("kb.json")},
                &err),
            0);
  EXPECT_NE(err.find("records: 5"), std::string::npos);
  const std::string first = read_file(dir.file("kb.json"));
  cli({"build-kb", "--index", fixture("kb_index.tsv"), "--ligands",
       fixture("kb_ligands.tsv"), "--out", dir.file("kb.json")});
  EXPECT_EQ(read_file(dir.file("kb.json")), first);

  write_file_atomic(dir.file("rej.tsv"),
                    "[c:1][H]\t[c:1]F\t3\t1\t1\t2\t16\n");
  EXPECT_EQ(cli({"build-templates", "--rules", dir.file("rej.tsv"), "--out",
                 dir.file("lib.json")}),
            3);
  EXPECT_EQ(cli({"build-templates", "--rules", fixture("rules.tsv"), "--out",
                 dir.file("lib.json")},
                &err),
            0);
  EXPECT_NE(err.find("[*:1][H]>>[*:1][F]"), std::string::npos);

  write_file_atomic(dir.file("bad.json"), R"({"bogus": 1})");
  EXPECT_EQ(cli({"--config", dir.file("bad.json"), "report"}), 18);

  write_file_atomic(dir.file("empty.jsonl"), "");
  EXPECT_EQ(cli({"report", "--discoveries", dir.file("empty.jsonl"),
                 "--format", "json"}),
            0);
  EXPECT_NE(cli({"frobnicate"}), 0);
}

}  // namespace
}  // namespace rxngrow
