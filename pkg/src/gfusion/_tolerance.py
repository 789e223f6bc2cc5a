"""Central numerical thresholds.

``GFUSION_TOL`` in the environment replaces the default relative tolerance
(``tol_eig``/``tol_herm``); it is read on every lookup so tests and the CLI
can change it at runtime.
"""

import os

import numpy as np

EPS = np.finfo(np.float64).eps

TOL_PSD = 1e-10
TOL_RECON = 1e-8
_TOL_REL = 1e-9


def tol_rel():
    raw = os.environ.get("GFUSION_TOL")
    if raw:
        try:
            value = float(raw)
        except ValueError:
            return _TOL_REL
        if value > 0 and np.isfinite(value):
            return value
    return _TOL_REL


def default_rank_tol(shape):
    # relative to sigma_max
    return max(shape) * EPS if shape else EPS
