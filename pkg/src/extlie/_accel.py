"""Backend selection for the hot kernels.

Set ``EXTLIE_NO_NUMBA=1`` to force the pure numpy implementation.  numba is
also skipped automatically when it is not importable.
"""
import os
import warnings

try:
    import numba
    from numba import njit, prange
    HAVE_NUMBA = True
    # an old system TBB only means numba falls back to its omp/workqueue layer
    warnings.filterwarnings("ignore", message="The TBB threading layer requires")
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f

    prange = range


def numba_enabled() -> bool:
    flag = os.environ.get("EXTLIE_NO_NUMBA", "").strip().lower()
    return HAVE_NUMBA and flag in ("", "0", "false", "no")


def resolve_backend(backend: str | None = None) -> str:
    if backend is None or backend == "auto":
        return "numba" if numba_enabled() else "numpy"
    if backend == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    return backend


def set_threads(n: int | None) -> None:
    if n and HAVE_NUMBA:
        numba.set_num_threads(max(1, min(int(n), numba.config.NUMBA_NUM_THREADS)))
