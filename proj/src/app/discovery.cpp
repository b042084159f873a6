//
// SPDX-License-Identifier: Apache-2.0
//

#include "rxngrow/discovery.h"

#include <algorithm>
#include <cstdio>
#include <nlohmann/json.hpp>

#include "rxngrow/errors.h"
#include "rxngrow/util/io.h"

namespace rxngrow {
namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

bool better(const Discovery &a, const Discovery &b) {
  if (a.docked_score != b.docked_score)
    return a.docked_score < b.docked_score;
  if (a.breakdown.qed_component != b.breakdown.qed_component)
    return a.breakdown.qed_component > b.breakdown.qed_component;
  return a.molecule.smiles() < b.molecule.smiles();
}

ordered_json row_json(const MetricsRow &r) {
  return {{"label", r.label},
          {"count", r.count},
          {"valid_count", r.valid_count},
          {"empty", r.empty},
          {"valid", r.validity},
          {"novelty", r.novelty},
          {"mw", r.mw},
          {"hbd", r.hbd},
          {"hba", r.hba},
          {"qed", r.qed},
          {"sa", r.sa},
          {"mean_affinity", r.mean_affinity},
          {"best_affinity", r.best_affinity},
          {"lipinski_pass", r.lipinski_pass}};
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace

bool passes_thresholds(const RewardBreakdown &b, const Thresholds &t) {
  return !b.docking_failed && b.docked_score <= t.affinity_max
         && b.qed_component >= t.qed_min;
}

bool DiscoveryCollector::admit(const Molecule &m, const RewardBreakdown &b,
                               std::int64_t episode_id, int step) {
  if (!passes_thresholds(b, thresholds_))
    return false;
  Discovery d{m, b, b.docked_score, episode_id, step};
  auto it = by_smiles_.find(m.smiles());
  if (it == by_smiles_.end()) {
    by_smiles_.emplace(m.smiles(), std::move(d));
    return true;
  }
  if (d.docked_score < it->second.docked_score) {
    it->second = std::move(d);
    return true;
  }
  return false;
}

std::vector<Discovery> DiscoveryCollector::ranked() const {
  std::vector<Discovery> all;
  for (const auto &[smiles, d]: by_smiles_)
    all.push_back(d);
  return rank(std::move(all));
}

std::vector<Discovery> rank(std::vector<Discovery> discoveries) {
  std::sort(discoveries.begin(), discoveries.end(), better);
  return discoveries;
}

MetricsRow compute_metrics(const std::vector<GeneratedMolecule> &generated,
                           const ReferenceSet &reference, ChemEngine &engine,
                           const std::string &label) {
  MetricsRow row;
  row.label = label;
  row.count = generated.size();
  size_t scored = 0;
  size_t lipinski = 0;
  for (const auto &g: generated) {
    std::optional<Molecule> m;
    try {
      m = parse_molecule(g.smiles, engine);
    } catch (const ParseError &) {
      continue;
    }
    const DescriptorSet &d = compute_descriptors(*m, engine);
    ++row.valid_count;
    row.novelty += novelty(*m, reference);
    row.mw += d.mw;
    row.hbd += d.hbd;
    row.hba += d.hba;
    row.qed += d.qed;
    row.sa += d.sa;
    lipinski += lipinski_report(d).all();
    if (g.docked_score) {
      row.best_affinity =
          scored ? std::min(row.best_affinity, *g.docked_score)
                 : *g.docked_score;
      row.mean_affinity += *g.docked_score;
      ++scored;
    }
  }
  row.empty = row.valid_count == 0;
  if (row.count)
    row.validity = static_cast<double>(row.valid_count)
                   / static_cast<double>(row.count);
  if (!row.empty) {
    const double n = static_cast<double>(row.valid_count);
    row.novelty /= n;
    row.mw /= n;
    row.hbd /= n;
    row.hba /= n;
    row.qed /= n;
    row.sa /= n;
    row.lipinski_pass = static_cast<double>(lipinski) / n;
  }
  if (scored)
    row.mean_affinity /= static_cast<double>(scored);
  return row;
}

std::string metrics_json(const std::vector<MetricsRow> &rows,
                         const std::string &target_id) {
  ordered_json doc = {{"format", "rxngrow-metrics"},
                      {"version", 1},
                      {"target", target_id},
                      {"columns", kMetricsColumns},
                      {"rows", ordered_json::array()}};
  for (const auto &r: rows)
    doc["rows"].push_back(row_json(r));
  return doc.dump(1) + "\n";
}

std::string metrics_csv(const std::vector<MetricsRow> &rows) {
  std::string out = std::string(kMetricsColumns) + "\n";
  for (const auto &r: rows) {
    const double v[] = {r.validity, r.novelty, r.mw, r.hbd, r.hba,
                        r.qed, r.sa, r.mean_affinity, r.best_affinity};
    for (size_t i = 0; i < std::size(v); ++i) {
      out += i ? "," : "";
      out += json(v[i]).dump();
    }
    out += "\n";
  }
  return out;
}

std::string metrics_text(const std::vector<MetricsRow> &rows,
                         const std::string &target_id) {
  static const char *kHead[] = {"set", "n", "Validity", "Novelty", "MW",
                                "HBD", "HBA", "QED", "SA", "Affinity",
                                "Best", "Lipinski"};
  std::vector<std::vector<std::string>> cells;
  cells.emplace_back(std::begin(kHead), std::end(kHead));
  for (const auto &r: rows) {
    cells.push_back({r.label.empty() ? "-" : r.label,
                     std::to_string(r.valid_count) + "/"
                         + std::to_string(r.count),
                     fixed(r.validity, 2), fixed(r.novelty, 2),
                     fixed(r.mw, 2), fixed(r.hbd, 2), fixed(r.hba, 2),
                     fixed(r.qed, 3), fixed(r.sa, 2),
                     fixed(r.mean_affinity, 2), fixed(r.best_affinity, 2),
                     fixed(r.lipinski_pass, 2)});
  }
  std::vector<size_t> width(cells[0].size(), 0);
  for (const auto &row: cells)
    for (size_t i = 0; i < row.size(); ++i)
      width[i] = std::max(width[i], row[i].size());
  std::string out = "target " + target_id + "\n";
  for (size_t r = 0; r < cells.size(); ++r) {
    for (size_t i = 0; i < cells[r].size(); ++i) {
      const std::string &c = cells[r][i];
      out += i ? "  " : "";
      out += i ? std::string(width[i] - c.size(), ' ') + c
               : c + std::string(width[i] - c.size(), ' ');
    }
    out += "\n";
    if (r == 0) {
      size_t total = 0;
      for (size_t w: width)
        total += w + 2;
      out += std::string(total - 2, '-') + "\n";
    }
  }
  for (const auto &r: rows)
    if (r.empty)
      out += "(" + (r.label.empty() ? std::string("-") : r.label)
             + ": no valid molecules)\n";
  return out;
}

std::string discoveries_jsonl(const std::vector<Discovery> &ranked) {
  std::string out;
  for (size_t i = 0; i < ranked.size(); ++i) {
    const Discovery &d = ranked[i];
    const RewardBreakdown &b = d.breakdown;
    ordered_json j = {{"rank", i + 1},
                      {"smiles", d.molecule.smiles()},
                      {"score", d.docked_score},
                      {"breakdown",
                       {{"affinity", b.affinity_component},
                        {"qed", b.qed_component},
                        {"sa", b.sa_component},
                        {"novelty", b.novelty_component},
                        {"total", b.total}}},
                      {"episode", d.episode_id},
                      {"step", d.step_found}};
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<GeneratedMolecule> read_discoveries(const std::string &path) {
  std::vector<GeneratedMolecule> out;
  const auto lines = read_lines(path);
  for (size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty())
      continue;
    try {
      const json j = json::parse(lines[i]);
      GeneratedMolecule g;
      g.smiles = j.at("smiles").get<std::string>();
      if (j.contains("score") && !j.at("score").is_null())
        g.docked_score = j.at("score").get<double>();
      out.push_back(std::move(g));
    } catch (const json::exception &e) {
      throw FormatError(path + ":" + std::to_string(i + 1) + ": "
                        + e.what());
    }
  }
  return out;
}

}  // namespace rxngrow
