//
// SPDX-License-Identifier: Apache-2.0
//

#include "rxngrow/reward_oracles.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "rxngrow/errors.h"
#include "rxngrow/util/hash.h"
#include "rxngrow/util/io.h"
#include "rxngrow/util/rng.h"
#include "rxngrow/util/subprocess.h"

namespace rxngrow {
namespace {

constexpr double kSurrogateDepth = 12.0;
constexpr double kSurrogateWidth = 8.0;
constexpr int kSurrogateMinOptimum = 26;
constexpr int kSurrogateOptimumSpan = 11;

std::string substitute(std::string arg, const std::string &key,
                       const std::string &value) {
  for (size_t pos = arg.find(key); pos != std::string::npos;
       pos = arg.find(key, pos + value.size()))
    arg.replace(pos, key.size(), value);
  return arg;
}

std::vector<std::string> expand(const std::vector<std::string> &tmpl,
                                const std::string &input,
                                const std::string &output,
                                const std::string &smiles = "") {
  std::vector<std::string> argv;
  for (const auto &a: tmpl)
    argv.push_back(substitute(substitute(substitute(a, "{input}", input),
                                         "{output}", output),
                              "{smiles}", smiles));
  return argv;
}

void check_box(const ProteinTarget &t) {
  for (double s: t.box_size)
    if (!(s > 0))
      throw ConfigError("docking box sizes must be positive for "
                        + t.target_id);
}

std::string fmt(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

}  // namespace

RewardBreakdown scalarize(const RewardComponents &c, const RewardWeights &w,
                          bool normalize) {
  RewardBreakdown b;
  b.affinity_component = c.affinity;
  b.qed_component = c.qed;
  b.sa_component = c.sa;
  b.novelty_component = c.novelty;
  double aff = c.affinity;
  double sa = c.sa;
  if (normalize) {
    aff = std::clamp(aff / kSurrogateDepth, 0.0, 1.0);
    sa = (sa - 1.0) / 9.0;
  }
  b.total = w.w1 * aff + w.w2 * c.qed - w.w3 * sa + w.w4 * c.novelty;
  b.docked_score = c.affinity == 0 ? 0.0 : -c.affinity;
  return b;
}

int surrogate_optimum(std::uint64_t target_seed) {
  return kSurrogateMinOptimum
         + static_cast<int>(Rng::derive(target_seed, 0x5eed)
                            % kSurrogateOptimumSpan);
}

double surrogate_dock(const Molecule &m, std::uint64_t target_seed) {
  const double d = (m.heavy_atom_count() - surrogate_optimum(target_seed))
                   / kSurrogateWidth;
  return -kSurrogateDepth * std::exp(-0.5 * d * d);
}

ProteinTarget prepare_receptor(const ProteinTarget &target,
                               const ConverterConfig &converter,
                               const std::string &output_path) {
  namespace fs = std::filesystem;
  check_box(target);
  if (!file_exists(target.pdb_path))
    throw FormatError("receptor file not found: " + target.pdb_path);
  const std::string out =
      output_path.empty()
          ? fs::path(target.pdb_path).replace_extension(".pdbqt").string()
          : output_path;
  ProteinTarget result = target;
  if (file_exists(out)
      && fs::last_write_time(out) >= fs::last_write_time(target.pdb_path)) {
    result.prepared_receptor = out;
    return result;
  }
  const auto argv = expand(converter.receptor_command, target.pdb_path, out);
  const ProcessResult r = run_process(argv);
  if (r.exit_code != 0)
    throw ConversionError("receptor conversion failed (exit "
                          + std::to_string(r.exit_code) + "): " + r.err);
  if (!file_exists(out))
    throw ConversionError("converter produced no output: " + out);
  result.prepared_receptor = out;
  return result;
}

SurrogateOracle::SurrogateOracle(std::string target_id,
                                 std::uint64_t target_seed)
    : target_id_(std::move(target_id)), seed_(target_seed) {}

std::unique_ptr<DockingOracle> SurrogateOracle::clone() const {
  return std::make_unique<SurrogateOracle>(target_id_, seed_);
}

double SurrogateOracle::dock(const Molecule &m) {
  return surrogate_dock(m, seed_);
}

SubprocessDockingOracle::SubprocessDockingOracle(ProteinTarget target,
                                                 DockingConfig config)
    : target_(std::move(target)), config_(std::move(config)) {
  static std::atomic<int> instances{0};
  instance_ = instances++;
  check_box(target_);
  if (!target_.prepared_receptor)
    throw ConfigError("target " + target_.target_id
                      + " has no prepared receptor");
  if (config_.exhaustiveness < 1)
    throw ConfigError("exhaustiveness must be positive");
}

std::unique_ptr<DockingOracle> SubprocessDockingOracle::clone() const {
  return std::make_unique<SubprocessDockingOracle>(target_, config_);
}

std::vector<std::string> SubprocessDockingOracle::docking_command(
    const std::string &ligand, const std::string &out) const {
  const auto &c = target_.box_center;
  const auto &s = target_.box_size;
  return {config_.vina_binary,
          "--receptor", *target_.prepared_receptor,
          "--ligand", ligand,
          "--center_x", fmt(c[0]), "--center_y", fmt(c[1]),
          "--center_z", fmt(c[2]),
          "--size_x", fmt(s[0]), "--size_y", fmt(s[1]), "--size_z", fmt(s[2]),
          "--exhaustiveness", std::to_string(config_.exhaustiveness),
          "--seed", std::to_string(config_.seed),
          "--cpu", "1",
          "--out", out};
}

double SubprocessDockingOracle::dock(const Molecule &m) {
  std::filesystem::create_directories(config_.work_dir);
  const std::string stem =
      config_.work_dir + "/" + std::to_string(instance_) + "-"
      + sha256_hex(m.smiles()).substr(0, 16);
  const std::string ligand = stem + "-ligand.pdbqt";
  const std::string out = stem + "-out.pdbqt";
  try {
    const auto prep =
        run_process(expand(config_.converter.ligand_command, "", ligand,
                           m.smiles()));
    if (prep.exit_code != 0 || !file_exists(ligand))
      throw DockingFailure("ligand preparation failed for " + m.smiles());
    const auto r = run_process(docking_command(ligand, out));
    if (r.exit_code != 0 || !file_exists(out))
      throw DockingFailure("docking failed for " + m.smiles() + " (exit "
                           + std::to_string(r.exit_code) + ")");
    return parse_docking_result(read_file(out));
  } catch (const ToolNotFoundError &e) {
    throw DockingFailure(e.what());
  } catch (const FormatError &e) {
    throw DockingFailure(e.what());
  }
}

double parse_docking_result(const std::string &text) {
  static const std::string kTag = "REMARK VINA RESULT:";
  const size_t pos = text.find(kTag);
  if (pos == std::string::npos)
    throw DockingFailure("no pose score in docking output");
  std::istringstream is(text.substr(pos + kTag.size(), 64));
  double score;
  if (!(is >> score) || !std::isfinite(score))
    throw DockingFailure("unreadable pose score in docking output");
  return score;
}

ScoreCache::ScoreCache(std::string path): path_(std::move(path)) {
  if (file_exists(path_)) {
    const auto lines = read_lines(path_);
    for (size_t i = 0; i < lines.size(); ++i) {
      if (lines[i].empty())
        continue;
      const auto f = split(lines[i], '\t');
      double v = 0;
      if (f.size() != 4
          || std::from_chars(f[3].data(), f[3].data() + f[3].size(), v).ec
                 != std::errc())
        throw FormatError(path_ + ":" + std::to_string(i + 1)
                          + ": malformed score cache row");
      entries_[f[0] + "\t" + f[1] + "\t" + f[2]] = v;
    }
  }
  if (std::filesystem::path(path_).has_parent_path())
    std::filesystem::create_directories(
        std::filesystem::path(path_).parent_path());
  file_ = std::fopen(path_.c_str(), "ab");
  if (!file_)
    throw Error("cannot open score cache: " + path_);
}

ScoreCache::~ScoreCache() {
  if (file_)
    std::fclose(file_);
}

std::string ScoreCache::key(const std::string &target_id,
                            const std::string &smiles, int exhaustiveness) {
  return target_id + "\t" + sha256_hex(smiles) + "\t"
         + std::to_string(exhaustiveness);
}

std::optional<double> ScoreCache::get(const std::string &key) const {
  std::lock_guard lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end())
    return std::nullopt;
  return it->second;
}

void ScoreCache::put(const std::string &key, double score) {
  std::lock_guard lock(mu_);
  if (!entries_.emplace(key, score).second || !file_)
    return;
  const std::string row = key + "\t" + fmt(score) + "\n";
  if (std::fwrite(row.data(), 1, row.size(), file_) != row.size()
      || std::fflush(file_) != 0)
    throw Error("score cache write failed: " + path_);
}

size_t ScoreCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

double dock(const Molecule &ligand, DockingOracle &oracle, ScoreCache &cache) {
  const std::string key =
      ScoreCache::key(oracle.target_id(), ligand.smiles(),
                      oracle.exhaustiveness());
  if (auto hit = cache.get(key))
    return *hit;
  const double score = oracle.dock(ligand);
  cache.put(key, score);
  return score;
}

ReferenceSet ReferenceSet::load(const std::string &path, ChemEngine &engine) {
  ReferenceSet ref;
  for (const auto &line: read_lines(path)) {
    const std::string smi = line.substr(0, line.find_first_of(" \t"));
    if (smi.empty())
      continue;
    try {
      ref.insert(engine.canonicalize(smi).canonical);
    } catch (const ParseError &) {
      ++ref.skipped_;
    }
  }
  return ref;
}

double novelty(const Molecule &m, const ReferenceSet &reference) {
  return reference.contains(m.smiles()) ? 0.0 : 1.0;
}

RewardBreakdown evaluate_reward(Molecule &m, ChemEngine &engine,
                                const RewardContext &ctx) {
  const DescriptorSet &d = compute_descriptors(m, engine);
  RewardComponents c;
  bool failed = false;
  try {
    c.affinity = affinity_from_score(dock(m, *ctx.docking, *ctx.cache));
  } catch (const DockingFailure &) {
    c.affinity = 0;
    failed = true;
  }
  c.qed = d.qed;
  c.sa = d.sa;
  c.novelty = ctx.reference ? novelty(m, *ctx.reference) : 1.0;
  RewardBreakdown b = scalarize(c, ctx.weights, ctx.normalize);
  b.docking_failed = failed;
  return b;
}

}  // namespace rxngrow
