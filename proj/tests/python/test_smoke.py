#
# SPDX-License-Identifier: Apache-2.0
#
import json
import math
import os
from pathlib import Path

import pytest

import rxngrow

FIXTURES = Path(os.environ.get(
    "RXNGROW_FIXTURE_DIR", Path(__file__).resolve().parents[1] / "fixtures"))


def test_canonicalize_is_idempotent():
    smi = rxngrow.canonicalize("OCC")
    assert smi == rxngrow.canonicalize(smi)
    assert rxngrow.heavy_atom_count("OCC") == 3


def test_descriptors_aspirin():
    d = rxngrow.descriptors("CC(=O)Oc1ccccc1C(=O)O")
    assert d["mw"] == pytest.approx(180.159, abs=1e-3)
    assert (d["hbd"], d["hba"]) == (1, 3)
    assert 0.0 <= d["qed"] <= 1.0
    assert 1.0 <= d["sa"] <= 10.0
    assert rxngrow.lipinski("CC(=O)Oc1ccccc1C(=O)O")["all"]


def test_parse_error_carries_exit_code():
    with pytest.raises(rxngrow.RxngrowError) as info:
        rxngrow.canonicalize("C1CC(")
    assert info.value.kind == "ParseError"
    assert info.value.exit_code == 4


def test_reaction_and_fragments():
    products = rxngrow.apply_reaction("[c:1]Cl>>[c:1]F", "Clc1ccccc1")
    assert products == [rxngrow.canonicalize("Fc1ccccc1")]
    assert rxngrow.fragment("CC(C)Cc1ccc(cc1)C(C)C(=O)O")


def test_scalarize_worked_example():
    r = rxngrow.scalarize(9.3, 0.3, 3.0, 1.0)
    assert r["total"] == pytest.approx(9.38, rel=1e-12)


def test_softmax_and_gae():
    p = rxngrow.softmax([1.0, 2.0, 3.0])
    assert math.fsum(p) == pytest.approx(1.0, abs=1e-12)
    shifted = rxngrow.softmax([101.0, 102.0, 103.0])
    assert shifted == pytest.approx(p, abs=1e-12)
    adv, ret = rxngrow.compute_gae([0.0, 0.0, 1.0], [0.0, 0.0, 0.0], 0.9, 1.0)
    assert ret == pytest.approx([0.81, 0.9, 1.0])
    assert adv == pytest.approx(ret)


def test_topk_similar_orders_and_clamps():
    kb = {"A": [1.0, 0.0], "B": [0.0, 1.0], "C": [1.0, 1.0]}
    hits = rxngrow.topk_similar([2.0, 0.1], kb, k=5)
    assert [h[0] for h in hits] == ["A", "C", "B"]
    with pytest.raises(rxngrow.RxngrowError):
        rxngrow.topk_similar([0.0, 0.0], kb, k=1)


def test_filter_rules_fixture():
    kept, tally = rxngrow.filter_rules(str(FIXTURES / "filter_rules.tsv"))
    assert tally["total"] == 20
    assert tally["accepted"] == len(kept) == 10
    assert (tally["failed_variable_size"], tally["failed_variable_fraction"],
            tally["failed_core"]) == (4, 5, 5)


def test_end_to_end_surrogate_run(tmp_path):
    config = json.loads((FIXTURES / "run_config.json").read_text())
    config.update(workspace=str(tmp_path / "ws"), kb_path=str(tmp_path / "kb.json"),
                  library_path=str(tmp_path / "lib.json"), workers=1)
    config["target"]["target_id"] = "TGT1"

    status, _ = rxngrow.build_kb(FIXTURES / "kb_index.tsv",
                                 FIXTURES / "kb_ligands.tsv", config=config)
    assert status == 0
    status, _ = rxngrow.build_templates(FIXTURES / "rules.tsv", config=config)
    assert status == 0
    status, _ = rxngrow.init_target(sequence_file=FIXTURES / "target.fasta",
                                    config=config)
    assert status == 0
    status, log = rxngrow.run(reference=FIXTURES / "reference.smi", config=config)
    assert status == 0, log
    for name in ("discoveries.jsonl", "checkpoint.bin", "report.json"):
        assert (tmp_path / "ws" / name).is_file()
    status, out, _ = rxngrow.report(reference=FIXTURES / "reference.smi",
                                    format="json", config=config)
    assert status == 0
    doc = json.loads(out)
    assert doc["format"] == "rxngrow-metrics"
    assert doc["rows"] and doc["rows"][0]["valid"] == 1.0
