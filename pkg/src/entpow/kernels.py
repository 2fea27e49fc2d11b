"""Backend selection for the observation-sweep kernel.

The compiled extension is used when it was built; otherwise the numpy
fallback takes over. Set ENTPOW_BACKEND=numpy or ENTPOW_BACKEND=cython
to force a backend (forcing cython fails loudly if the extension is
missing).
"""

import os

_requested = os.environ.get("ENTPOW_BACKEND", "").strip().lower()

if _requested == "numpy":
    from . import _kernels_np as _impl
elif _requested == "cython":
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError as exc:
        raise ImportError(
            "ENTPOW_BACKEND=cython but the compiled kernel is not available; "
            "reinstall with a working C compiler or unset ENTPOW_BACKEND"
        ) from exc
elif _requested:
    raise ValueError(f"unknown ENTPOW_BACKEND value: {_requested!r}")
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        from . import _kernels_np as _impl  # type: ignore[no-redef]

BACKEND = _impl.BACKEND_NAME
moment_sweep = _impl.moment_sweep


def available_backends():
    """Names of the kernel backends importable in this installation."""
    names = ["numpy"]
    try:
        from . import _kernels  # noqa: F401

        names.append("cython")
    except ImportError:
        pass
    return names


def get_backend(name):
    """Return the kernel module for an explicit backend name."""
    if name == "numpy":
        from . import _kernels_np

        return _kernels_np
    if name == "cython":
        from . import _kernels

        return _kernels
    raise ValueError(f"unknown backend: {name!r}")
