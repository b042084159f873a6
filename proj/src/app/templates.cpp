//
// SPDX-License-Identifier: Apache-2.0
//

#include "rxngrow/templates.h"

#include <algorithm>
#include <charconv>
#include <map>
#include <nlohmann/json.hpp>
#include <set>

#include "rxngrow/chem/reaction.h"
#include "rxngrow/errors.h"
#include "rxngrow/util/io.h"

namespace rxngrow {
namespace {

using nlohmann::json;

template <typename T>
bool parse_int(const std::string &s, T &out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

json filter_to_json(const FilterConfig &f) {
  return {{"max_variable_atoms", f.max_variable_atoms},
          {"max_variable_fraction", f.max_variable_fraction},
          {"min_core_atoms", f.min_core_atoms},
          {"min_frequency", f.min_frequency}};
}

}  // namespace

std::vector<MmpRule> parse_rule_dump(const std::string &path) {
  const auto lines = read_lines(path);
  std::vector<MmpRule> rules;
  std::map<std::pair<std::string, std::string>, size_t> index;
  bool header_allowed = true;
  for (size_t i = 0; i < lines.size(); ++i) {
    const std::string &line = lines[i];
    const std::string where = path + ":" + std::to_string(i + 1) + ": ";
    if (line.empty() || line[0] == '#')
      continue;
    if (header_allowed && line.rfind("lhs", 0) == 0) {
      header_allowed = false;
      continue;
    }
    header_allowed = false;
    const auto f = split(line, '\t');
    if (f.size() != 7)
      throw FormatError(where + "expected 7 fields, got "
                        + std::to_string(f.size()));
    MmpRule r;
    r.lhs = f[0];
    r.rhs = f[1];
    if (r.lhs.empty() || r.rhs.empty())
      throw FormatError(where + "empty SMARTS");
    if (r.lhs.find(">>") != std::string::npos
        || r.rhs.find(">>") != std::string::npos)
      throw FormatError(where + "fragment SMARTS may not contain '>>'");
    if (!parse_int(f[2], r.frequency) || r.frequency < 1)
      throw FormatError(where + "frequency must be a positive integer");
    if (!parse_int(f[3], r.variable_atoms_lhs)
        || !parse_int(f[4], r.variable_atoms_rhs)
        || !parse_int(f[5], r.core_atoms) || !parse_int(f[6], r.parent_atoms)
        || r.variable_atoms_lhs < 0 || r.variable_atoms_rhs < 0
        || r.core_atoms < 0 || r.parent_atoms < 0)
      throw FormatError(where + "atom counts must be non-negative integers");
    try {
      chem::Reaction::parse(reaction_smarts_for(r));
    } catch (const ParseError &e) {
      throw FormatError(where + e.what());
    }
    auto key = std::make_pair(r.lhs, r.rhs);
    auto it = index.find(key);
    if (it != index.end()) {
      rules[it->second].frequency += r.frequency;
    } else {
      index.emplace(std::move(key), rules.size());
      rules.push_back(std::move(r));
    }
  }
  return rules;
}

RuleVerdict evaluate_rule(const MmpRule &rule, const FilterConfig &cfg) {
  const int var = std::max(rule.variable_atoms_lhs, rule.variable_atoms_rhs);
  RuleVerdict v;
  v.variable_size_ok = var <= cfg.max_variable_atoms;
  v.variable_fraction_ok = var <= cfg.max_variable_fraction * rule.parent_atoms;
  v.core_ok = rule.core_atoms >= cfg.min_core_atoms;
  v.frequency_ok = rule.frequency >= cfg.min_frequency;
  return v;
}

std::vector<MmpRule> filter_rules(const std::vector<MmpRule> &rules,
                                  const FilterConfig &cfg,
                                  FilterTally *tally) {
  FilterTally t;
  std::vector<MmpRule> kept;
  for (const auto &r: rules) {
    const RuleVerdict v = evaluate_rule(r, cfg);
    ++t.total;
    t.failed_variable_size += !v.variable_size_ok;
    t.failed_variable_fraction += !v.variable_fraction_ok;
    t.failed_core += !v.core_ok;
    t.failed_frequency += !v.frequency_ok;
    if (v.accepted()) {
      ++t.accepted;
      kept.push_back(r);
    } else {
      ++t.rejected;
    }
  }
  if (tally)
    *tally = t;
  return kept;
}

std::string reaction_smarts_for(const MmpRule &rule) {
  return rule.lhs + ">>" + rule.rhs;
}

TemplateLibrary build_library(const std::vector<MmpRule> &rules,
                              const FilterConfig &filter) {
  if (rules.empty())
    throw EmptyLibraryError("no rules left to build a template library");
  // Merge again in case the caller passes unmerged rules.
  std::map<std::string, std::int64_t> freq;
  for (const auto &r: rules)
    freq[reaction_smarts_for(r)] += r.frequency;
  TemplateLibrary lib;
  lib.filter = filter;
  for (const auto &[smarts, f]: freq)
    lib.templates.push_back({0, smarts, f});
  std::stable_sort(lib.templates.begin(), lib.templates.end(),
                   [](const ReactionTemplate &a, const ReactionTemplate &b) {
                     return a.frequency > b.frequency;
                   });
  for (size_t i = 0; i < lib.templates.size(); ++i)
    lib.templates[i].template_id = static_cast<int>(i);
  return lib;
}

std::string serialize_library(const TemplateLibrary &lib) {
  json templates = json::array();
  for (const auto &t: lib.templates)
    templates.push_back({{"template_id", t.template_id},
                         {"reaction_smarts", t.reaction_smarts},
                         {"frequency", t.frequency}});
  json doc = {{"format", "rxngrow-template-library"},
              {"version", 1},
              {"filter", filter_to_json(lib.filter)},
              {"templates", templates}};
  return doc.dump(1) + "\n";
}

TemplateLibrary deserialize_library(const std::string &text) {
  TemplateLibrary lib;
  try {
    const json doc = json::parse(text);
    if (doc.at("format") != "rxngrow-template-library"
        || doc.at("version") != 1)
      throw FormatError("not a version 1 template library");
    const json &f = doc.at("filter");
    lib.filter.max_variable_atoms = f.at("max_variable_atoms").get<int>();
    lib.filter.max_variable_fraction =
        f.at("max_variable_fraction").get<double>();
    lib.filter.min_core_atoms = f.at("min_core_atoms").get<int>();
    lib.filter.min_frequency = f.at("min_frequency").get<std::int64_t>();
    std::set<int> ids;
    for (const auto &t: doc.at("templates")) {
      ReactionTemplate rt;
      rt.template_id = t.at("template_id").get<int>();
      rt.reaction_smarts = t.at("reaction_smarts").get<std::string>();
      rt.frequency = t.at("frequency").get<std::int64_t>();
      if (!ids.insert(rt.template_id).second)
        throw FormatError("duplicate template_id "
                          + std::to_string(rt.template_id));
      lib.templates.push_back(std::move(rt));
    }
  } catch (const json::exception &e) {
    throw FormatError(std::string("malformed template library: ") + e.what());
  }
  for (size_t i = 1; i < lib.templates.size(); ++i) {
    const auto &a = lib.templates[i - 1];
    const auto &b = lib.templates[i];
    if (a.frequency < b.frequency
        || (a.frequency == b.frequency && a.template_id > b.template_id))
      throw FormatError("template library is not in frequency order");
  }
  return lib;
}

void save_library(const TemplateLibrary &lib, const std::string &path) {
  write_file_atomic(path, serialize_library(lib));
}

TemplateLibrary load_library(const std::string &path) {
  TemplateLibrary lib = deserialize_library(read_file(path));
  if (lib.templates.empty())
    throw EmptyLibraryError("template library is empty: " + path);
  return lib;
}

std::vector<Action> enumerate_actions(const Molecule &m,
                                      const TemplateLibrary &lib,
                                      ChemEngine &engine,
                                      size_t max_actions) {
  std::vector<Action> actions;
  std::set<std::string> seen;
  for (const auto &t: lib.templates) {
    for (const std::string &smi:
         engine.apply_reaction(t.reaction_smarts, m.smiles())) {
      if (!seen.insert(smi).second)
        continue;
      try {
        actions.push_back({t.template_id, parse_molecule(smi, engine)});
      } catch (const ParseError &) {
        continue;
      }
      if (max_actions && actions.size() >= max_actions)
        return actions;
    }
  }
  return actions;
}

}  // namespace rxngrow
