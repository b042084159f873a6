//
// SPDX-License-Identifier: Apache-2.0
//

#ifndef RXNGROW_TEMPLATES_H_
#define RXNGROW_TEMPLATES_H_

#include <cstdint>
#include <string>
#include <vector>

#include "rxngrow/chem_core.h"

namespace rxngrow {

inline constexpr size_t kDefaultMaxActions = 128;

struct MmpRule {
  std::string lhs;
  std::string rhs;
  std::int64_t frequency = 1;
  int variable_atoms_lhs = 0;
  int variable_atoms_rhs = 0;
  int core_atoms = 0;
  int parent_atoms = 0;

  bool operator==(const MmpRule &) const = default;
};

struct FilterConfig {
  int max_variable_atoms = 10;
  double max_variable_fraction = 0.5;  // of parent_atoms
  int min_core_atoms = 6;
  std::int64_t min_frequency = 1;

  bool operator==(const FilterConfig &) const = default;
};

struct RuleVerdict {
  bool variable_size_ok = false;
  bool variable_fraction_ok = false;
  bool core_ok = false;
  bool frequency_ok = false;

  bool accepted() const {
    return variable_size_ok && variable_fraction_ok && core_ok && frequency_ok;
  }
};

// Rejections are counted once per failing criterion, so a rule failing two
// criteria appears in two counters.
struct FilterTally {
  int total = 0;
  int accepted = 0;
  int rejected = 0;
  int failed_variable_size = 0;
  int failed_variable_fraction = 0;
  int failed_core = 0;
  int failed_frequency = 0;
};

struct ReactionTemplate {
  int template_id = 0;
  std::string reaction_smarts;
  std::int64_t frequency = 1;

  bool operator==(const ReactionTemplate &) const = default;
};

struct TemplateLibrary {
  // Ordered by frequency descending, then template_id ascending.
  std::vector<ReactionTemplate> templates;
  FilterConfig filter;

  bool operator==(const TemplateLibrary &) const = default;
};

struct Action {
  int template_id = 0;
  Molecule product;
};

// Lines "lhs<TAB>rhs<TAB>frequency<TAB>var_lhs<TAB>var_rhs<TAB>core<TAB>
// parent". Blank lines, '#' comments and a leading header row starting with
// "lhs" are skipped. Rules with equal (lhs, rhs) are merged by summing
// frequencies; the atom counts of the first occurrence are kept. Output
// follows first occurrence. Throws FormatError with the line number.
std::vector<MmpRule> parse_rule_dump(const std::string &path);

RuleVerdict evaluate_rule(const MmpRule &rule, const FilterConfig &cfg);
std::vector<MmpRule> filter_rules(const std::vector<MmpRule> &rules,
                                  const FilterConfig &cfg,
                                  FilterTally *tally = nullptr);

// "lhs>>rhs".
std::string reaction_smarts_for(const MmpRule &rule);

// Ids are assigned 0..n-1 in (frequency desc, reaction SMARTS asc) order,
// so they do not depend on input order. Throws EmptyLibraryError.
TemplateLibrary build_library(const std::vector<MmpRule> &rules,
                              const FilterConfig &filter = {});

std::string serialize_library(const TemplateLibrary &lib);
TemplateLibrary deserialize_library(const std::string &text);
void save_library(const TemplateLibrary &lib, const std::string &path);
// Throws FormatError, EmptyLibraryError.
TemplateLibrary load_library(const std::string &path);

// Every applicable template's products in library order, deduplicated by
// canonical SMILES, at most max_actions entries (0 means no limit).
std::vector<Action> enumerate_actions(const Molecule &m,
                                      const TemplateLibrary &lib,
                                      ChemEngine &engine,
                                      size_t max_actions = kDefaultMaxActions);

}  // namespace rxngrow

#endif  // RXNGROW_TEMPLATES_H_
