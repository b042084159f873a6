//
// SPDX-License-Identifier: Apache-2.0
//

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "rxngrow/chem_core.h"
#include "rxngrow/errors.h"
#include "rxngrow/pipeline.h"
#include "rxngrow/ppo_agent.h"
#include "rxngrow/reward_oracles.h"
#include "rxngrow/similarity.h"
#include "rxngrow/templates.h"

namespace py = pybind11;
using namespace rxngrow;

namespace {

// Engines are not thread safe; the GIL serializes access to this one.
NativeEngine &engine() {
  static NativeEngine e;
  return e;
}

RunConfig config_from(const std::string &config_json) {
  RunConfig cfg;
  if (!config_json.empty()) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(config_json);
    } catch (const nlohmann::json::exception &e) {
      throw FormatError(std::string("malformed config: ") + e.what());
    }
    apply_config_json(cfg, j);
  }
  validate_run_config(cfg);
  return cfg;
}

py::dict descriptor_dict(const DescriptorSet &d) {
  py::dict out;
  out["mw"] = d.mw;
  out["hbd"] = d.hbd;
  out["hba"] = d.hba;
  out["qed"] = d.qed;
  out["sa"] = d.sa;
  return out;
}

py::dict tally_dict(const FilterTally &t) {
  py::dict out;
  out["total"] = t.total;
  out["accepted"] = t.accepted;
  out["rejected"] = t.rejected;
  out["failed_variable_size"] = t.failed_variable_size;
  out["failed_variable_fraction"] = t.failed_variable_fraction;
  out["failed_core"] = t.failed_core;
  out["failed_frequency"] = t.failed_frequency;
  return out;
}

// Runs a command with the GIL released and returns (status, log text).
template <typename F>
py::tuple run_command(F &&f) {
  std::ostringstream log;
  int status;
  {
    py::gil_scoped_release release;
    status = f(log);
  }
  return py::make_tuple(status, log.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "rxngrow native core";

  // Leaked on purpose; the translator may run during interpreter teardown.
  static const py::handle error =
      py::exception<Error>(m, "RxngrowError").release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p)
        std::rethrow_exception(p);
    } catch (const Error &e) {
      py::object exc = error(py::str(e.what()));
      exc.attr("kind") = e.kind();
      exc.attr("exit_code") = e.exit_code();
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  m.def("canonicalize", [](const std::string &smiles) {
    return engine().canonicalize(smiles).canonical;
  });
  m.def("heavy_atom_count", [](const std::string &smiles) {
    return engine().canonicalize(smiles).heavy_atom_count;
  });
  m.def("descriptors", [](const std::string &smiles) {
    Molecule mol = parse_molecule(smiles, engine());
    return descriptor_dict(compute_descriptors(mol, engine()));
  });
  m.def("lipinski", [](const std::string &smiles) {
    Molecule mol = parse_molecule(smiles, engine());
    const LipinskiReport r =
        lipinski_report(compute_descriptors(mol, engine()));
    py::dict out;
    out["mw_ok"] = r.mw_ok;
    out["hbd_ok"] = r.hbd_ok;
    out["hba_ok"] = r.hba_ok;
    out["all"] = r.all();
    return out;
  });
  m.def("fragment", [](const std::string &smiles) {
    return engine().fragment(parse_molecule(smiles, engine()).smiles());
  });
  m.def(
      "apply_reaction",
      [](const std::string &reaction_smarts, const std::string &smiles) {
        return engine().apply_reaction(
            reaction_smarts, parse_molecule(smiles, engine()).smiles());
      },
      py::arg("reaction_smarts"), py::arg("smiles"));

  m.def(
      "scalarize",
      [](double affinity, double qed, double sa, double novelty, double w1,
         double w2, double w3, double w4, bool normalize) {
        const RewardBreakdown b = scalarize({affinity, qed, sa, novelty},
                                            {w1, w2, w3, w4}, normalize);
        py::dict out;
        out["affinity"] = b.affinity_component;
        out["qed"] = b.qed_component;
        out["sa"] = b.sa_component;
        out["novelty"] = b.novelty_component;
        out["total"] = b.total;
        return out;
      },
      py::arg("affinity"), py::arg("qed"), py::arg("sa"), py::arg("novelty"),
      py::arg("w1") = RewardWeights{}.w1, py::arg("w2") = RewardWeights{}.w2,
      py::arg("w3") = RewardWeights{}.w3, py::arg("w4") = RewardWeights{}.w4,
      py::arg("normalize") = false);
  m.def(
      "surrogate_dock",
      [](const std::string &smiles, std::uint64_t target_seed) {
        return surrogate_dock(parse_molecule(smiles, engine()), target_seed);
      },
      py::arg("smiles"), py::arg("target_seed"));

  m.def("softmax", [](const std::vector<double> &logits) {
    return softmax(logits);
  });
  m.def(
      "compute_gae",
      [](const std::vector<double> &rewards, const std::vector<double> &values,
         double gamma, double lam) {
        Advantages a = compute_gae(rewards, values, gamma, lam);
        return py::make_tuple(a.advantages, a.returns);
      },
      py::arg("rewards"), py::arg("values"), py::arg("gamma"),
      py::arg("lam"));

  m.def(
      "topk_similar",
      [](const std::vector<float> &query,
         const std::map<std::string, std::vector<float>> &kb, int k) {
        const std::string id = "python";
        const Embedding q{query, static_cast<int>(query.size()), id};
        std::map<std::string, Embedding> db;
        for (const auto &[key, v]: kb)
          db.emplace(key, Embedding{v, static_cast<int>(v.size()), id});
        std::vector<std::pair<std::string, double>> out;
        for (const auto &h: topk_similar(q, db, k))
          out.emplace_back(h.pdb_id, h.score);
        return out;
      },
      py::arg("query"), py::arg("kb"), py::arg("k") = kDefaultTopK);

  m.def(
      "filter_rules",
      [](const std::string &path, int max_variable_atoms,
         double max_variable_fraction, int min_core_atoms,
         std::int64_t min_frequency) {
        const FilterConfig cfg{max_variable_atoms, max_variable_fraction,
                               min_core_atoms, min_frequency};
        FilterTally tally;
        std::vector<std::string> kept;
        for (const auto &r: filter_rules(parse_rule_dump(path), cfg, &tally))
          kept.push_back(reaction_smarts_for(r));
        return py::make_tuple(kept, tally_dict(tally));
      },
      py::arg("path"),
      py::arg("max_variable_atoms") = FilterConfig{}.max_variable_atoms,
      py::arg("max_variable_fraction") = FilterConfig{}.max_variable_fraction,
      py::arg("min_core_atoms") = FilterConfig{}.min_core_atoms,
      py::arg("min_frequency") = FilterConfig{}.min_frequency);

  // Commands take the run config as JSON text and return (status, log).
  m.def(
      "build_kb",
      [](const std::string &config, const std::string &index,
         const std::string &ligands, const std::string &out) {
        const RunConfig cfg = config_from(config);
        return run_command([&](std::ostream &log) {
          return cmd_build_kb(cfg, {index, ligands, out}, log);
        });
      },
      py::arg("config"), py::arg("index"), py::arg("ligands"),
      py::arg("out") = "");
  m.def(
      "build_templates",
      [](const std::string &config, const std::string &rules,
         const std::string &out) {
        const RunConfig cfg = config_from(config);
        return run_command([&](std::ostream &log) {
          return cmd_build_templates(cfg, {rules, out}, log);
        });
      },
      py::arg("config"), py::arg("rules"), py::arg("out") = "");
  m.def(
      "init_target",
      [](const std::string &config, const std::string &kb,
         const std::string &sequence_file) {
        const RunConfig cfg = config_from(config);
        return run_command([&](std::ostream &log) {
          return cmd_init_target(cfg, {kb, sequence_file}, log);
        });
      },
      py::arg("config"), py::arg("kb") = "", py::arg("sequence_file") = "");
  m.def(
      "run",
      [](const std::string &config, const std::string &library,
         const std::string &reference) {
        const RunConfig cfg = config_from(config);
        return run_command([&](std::ostream &log) {
          return cmd_run(cfg, {library, reference}, log);
        });
      },
      py::arg("config"), py::arg("library") = "", py::arg("reference") = "");
  m.def(
      "report",
      [](const std::string &config, const std::string &discoveries,
         const std::string &reference, const std::string &format,
         const std::string &target_id) {
        const RunConfig cfg = config_from(config);
        std::ostringstream out;
        std::ostringstream log;
        int status;
        {
          py::gil_scoped_release release;
          ReportOptions opts{discoveries, reference, format, "", target_id};
          status = cmd_report(cfg, opts, out, log);
        }
        return py::make_tuple(status, out.str(), log.str());
      },
      py::arg("config"), py::arg("discoveries") = "",
      py::arg("reference") = "", py::arg("format") = "text",
      py::arg("target_id") = "");
}
