"""Moment bounds, tail bounds and limit-theorem checks for multi-indexed sums."""

import json as _json

from . import _core
from ._core import (  # noqa: F401
    AxisDistribution,
    DegenerateKernel,
    FactorFamily,
    IndexSet,
    PsiFunction,
    brownian_singular_values,
    compose_psi_product,
    cube,
    dp_quasinorm,
    empirical_moment,
    entropy_integral_power,
    exact_min_cover,
    factor_moment,
    greedy_cover,
    klesov_bound,
    ks_distance,
    lshape_fixed_fraction,
    rect_pair,
    rosenthal_K,
    sample_S_infty,
    simulate_S_L,
    square_minus_corner,
    square_plus_cell,
    tail_bound,
    trivial_bound,
    young_fenchel,
)


def verify_rect_nclt(kernel, sizes, seed, N=20000, N_limit=100000, workers=1):
    """KS convergence report for S_L on n x ... x n boxes, as a dict."""
    return _json.loads(_core.verify_rect_nclt(kernel, list(sizes), seed, N, N_limit, workers))


def run_command(subcommand, config, out, workers=1, seed_override=None, which=""):
    """Run a CLI subcommand in-process. Returns (exit_code, files, error_dict_or_None)."""
    code, files, err = _core.run_command(subcommand, str(config), str(out), workers, seed_override, which)
    return code, dict(files), (_json.loads(err) if err else None)
