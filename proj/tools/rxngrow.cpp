//
// SPDX-License-Identifier: Apache-2.0
//
// Command-line driver: build-kb, build-templates, init-target, run, report.

#include <CLI11.hpp>
#include <iostream>
#include <optional>

#include "rxngrow/errors.h"
#include "rxngrow/pipeline.h"

int main(int argc, char **argv) {
  CLI::App app{"Reaction-template molecule growth with PPO"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  std::string config_path;
  std::optional<int> workers;
  std::string oracle;
  app.add_option("--seed", seed, "Random seed");
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--workers", workers, "Parallel rollout workers");
  app.add_option("--oracle", oracle, "Reward oracle")
      ->check(CLI::IsMember({"docking", "surrogate"}));
  std::string workspace_dir;
  app.add_option("--workspace", workspace_dir, "Workspace directory");

  rxngrow::BuildKbOptions kb_opts;
  auto *build_kb = app.add_subcommand("build-kb", "Ingest protein/ligand tables");
  build_kb->add_option("--index", kb_opts.index, "Protein index TSV")
      ->required();
  build_kb->add_option("--ligands", kb_opts.ligands, "Ligand TSV")->required();
  build_kb->add_option("--out", kb_opts.out, "Knowledge-base store");

  rxngrow::BuildTemplatesOptions tpl_opts;
  auto *build_tpl =
      app.add_subcommand("build-templates", "Filter MMP rules into templates");
  build_tpl->add_option("--rules", tpl_opts.rules, "Rule dump")->required();
  build_tpl->add_option("--out", tpl_opts.out, "Template library");

  rxngrow::InitTargetOptions target_opts;
  std::string pdb_path, target_id;
  std::vector<double> center, size;
  std::optional<int> k;
  auto *init = app.add_subcommand("init-target",
                                  "Select similar proteins and fragment pool");
  init->add_option("--kb", target_opts.kb, "Knowledge-base store");
  init->add_option("--sequence", target_opts.sequence_file,
                   "Target sequence (FASTA or plain)");
  init->add_option("--pdb", pdb_path, "Target structure");
  init->add_option("--target-id", target_id, "Target identifier");
  init->add_option("--center", center, "Box center x y z")->expected(3);
  init->add_option("--size", size, "Box size x y z")->expected(3);
  init->add_option("-k,--top-k", k, "Similar proteins to keep");

  rxngrow::RunOptions run_opts;
  std::optional<int> episodes;
  auto *run = app.add_subcommand("run", "Train the agent and collect molecules");
  run->add_option("--library", run_opts.library, "Template library");
  run->add_option("--reference", run_opts.reference, "Novelty reference SMILES");
  run->add_option("--episodes", episodes, "Episode count");

  rxngrow::ReportOptions report_opts;
  auto *report = app.add_subcommand("report", "Summarize discoveries");
  report->add_option("--discoveries", report_opts.discoveries,
                     "Discoveries JSONL");
  report->add_option("--reference", report_opts.reference,
                     "Novelty reference SMILES");
  report->add_option("--format", report_opts.format, "json, csv or text")
      ->check(CLI::IsMember({"json", "csv", "text"}));
  report->add_option("--out", report_opts.out, "Output file");
  report->add_option("--target-id", report_opts.target_id, "Target label");

  CLI11_PARSE(app, argc, argv);

  try {
    rxngrow::RunConfig cfg;
    if (!config_path.empty())
      cfg = rxngrow::load_run_config(config_path);
    if (seed)
      cfg.seed = *seed;
    if (workers)
      cfg.workers = *workers;
    if (!oracle.empty())
      cfg.oracle = oracle;
    if (!workspace_dir.empty())
      cfg.workspace = workspace_dir;
    if (episodes)
      cfg.episodes = *episodes;
    if (k)
      cfg.k = *k;
    if (!pdb_path.empty())
      cfg.target.pdb_path = pdb_path;
    if (!target_id.empty())
      cfg.target.target_id = target_id;
    if (center.size() == 3)
      cfg.target.box_center = {center[0], center[1], center[2]};
    if (size.size() == 3)
      cfg.target.box_size = {size[0], size[1], size[2]};

    if (*build_kb)
      return rxngrow::cmd_build_kb(cfg, kb_opts, std::cerr);
    if (*build_tpl)
      return rxngrow::cmd_build_templates(cfg, tpl_opts, std::cerr);
    if (*init)
      return rxngrow::cmd_init_target(cfg, target_opts, std::cerr);
    if (*run)
      return rxngrow::cmd_run(cfg, run_opts, std::cerr);
    if (*report)
      return rxngrow::cmd_report(cfg, report_opts, std::cout, std::cerr);
  } catch (const rxngrow::Error &e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
