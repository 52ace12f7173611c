"""Canonical variational disentangling of matrix product states.

Thin Python layer over the compiled ``_core`` extension. JSON-valued methods
return strings; the ``*_dict`` helpers below parse them.
"""

import json

from ._core import (
    Circuit,
    CvdConfig,
    CvdReport,
    CvdResult,
    InvariantError,
    IoError,
    Mps,
    __version__,
    aklt,
    analytic_gradient_theta0,
    apply_gate,
    canonicalize,
    cluster,
    disentangle,
    distance,
    eps_site,
    expectation,
    fd_gradient,
    gate_matrix,
    ghz,
    ground_state,
    haar_isometry,
    lemma1_bound,
    lemma1_property,
    lemma2_bound,
    lemma2_check,
    lemma3_stats,
    load_circuit,
    load_mps,
    load_report,
    local_cost,
    logical_bell,
    overlap,
    random_mps,
    renyi_entropy,
    truncate,
    zero_state,
)


def to_dict(obj):
    """Parse the JSON form of an Mps, Circuit, CvdReport or CvdConfig."""
    return json.loads(obj.to_json())


__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
