#
# SPDX-License-Identifier: Apache-2.0
#
"""Template-driven molecule growth with a PPO agent."""

import json
import os
from pathlib import Path

# A wheel ships the SA fragment table next to the package.
_table = Path(__file__).with_name("data") / "sa_fragment_scores.bin.gz"
if _table.is_file():
    os.environ.setdefault("RXNGROW_SA_TABLE", str(_table))

from . import _core  # noqa: E402
from ._core import (  # noqa: E402,F401
    RxngrowError,
    apply_reaction,
    canonicalize,
    compute_gae,
    descriptors,
    filter_rules,
    fragment,
    heavy_atom_count,
    lipinski,
    scalarize,
    softmax,
    surrogate_dock,
    topk_similar,
)


def _config_text(config):
    """Accepts None, a dict, or a path to a JSON file."""
    if config is None:
        return ""
    if isinstance(config, dict):
        return json.dumps(config)
    return Path(config).read_text()


def build_kb(index, ligands, out="", config=None):
    return _core.build_kb(_config_text(config), str(index), str(ligands), str(out))


def build_templates(rules, out="", config=None):
    return _core.build_templates(_config_text(config), str(rules), str(out))


def init_target(kb="", sequence_file="", config=None):
    return _core.init_target(_config_text(config), str(kb), str(sequence_file))


def run(library="", reference="", config=None):
    return _core.run(_config_text(config), str(library), str(reference))


def report(discoveries="", reference="", format="text", target_id="", config=None):
    return _core.report(
        _config_text(config), str(discoveries), str(reference), format, target_id
    )
