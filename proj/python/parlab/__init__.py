"""Python interface to the parlab native core.

The heavy lifting happens in the compiled module ``_parlab``; this wrapper
adds dict-based configs and report parsing on top of its JSON-string API.
"""

import json as _json

try:
    from ._parlab import (  # type: ignore
        ValidationError,
        StructureError,
        SolverError,
        heat_kernel,
        read_field,
        run_config as _run_config,
        solve_config as _solve_config,
        kernel_config as _kernel_config,
    )
except ImportError:  # in-tree builds put _parlab next to this package on sys.path
    from _parlab import (  # type: ignore
        ValidationError,
        StructureError,
        SolverError,
        heat_kernel,
        read_field,
        run_config as _run_config,
        solve_config as _solve_config,
        kernel_config as _kernel_config,
    )

__all__ = [
    "ValidationError",
    "StructureError",
    "SolverError",
    "heat_kernel",
    "read_field",
    "run",
    "solve",
    "estimate_kernel",
]


def _dump(config):
    if isinstance(config, str):
        return config
    return _json.dumps(config)


def run(config, out_dir=".", reproducible=False, workers=1, seed=None):
    """Execute the action named in ``config`` and return the report records.

    ``config`` is a dict (or JSON string) in the experiment-configuration
    format; artifacts and ``report.jsonl`` are written into ``out_dir``.
    """
    return _json.loads(
        _run_config(_dump(config), out_dir, reproducible, workers, seed)
    )


def solve(config, time_weight=1.0):
    """Solve the configured problem in memory.

    Returns ``(grid, values)`` where ``values`` is a numpy array shaped
    ``(steps + 1, cells_0, ..., cells_{n-1})``.
    """
    return _solve_config(_dump(config), time_weight)


def estimate_kernel(config, source, tail_tol=1e-8):
    """Fundamental-solution surrogate from a point source at ``source``.

    Returns a dict with the kernel values, the effective-box diagnostics and
    the two-sided Gaussian envelope fit.
    """
    return _kernel_config(_dump(config), list(source), tail_tol)
