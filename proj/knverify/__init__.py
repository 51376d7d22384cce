"""Python interface to the verification library.

The compiled extension lives inside this package when installed.  For
in-tree development (running pytest against a CMake build directory),
set KNVERIFY_MODULE_DIR to the directory containing the built
_knverify module.
"""

import json as _json
import os as _os
import sys as _sys

_dev_dir = _os.environ.get("KNVERIFY_MODULE_DIR")
if _dev_dir:
    if _dev_dir not in _sys.path:
        _sys.path.insert(0, _dev_dir)
    import _knverify as _impl
    from _knverify import *  # noqa: F401,F403
else:
    from . import _knverify as _impl
    from ._knverify import *  # noqa: F401,F403

__all__ = [_n for _n in dir(_impl) if not _n.startswith("_")] + ["verify"]
__version__ = "0.1.0"


def verify(campaign, seeds=(1,), include_timing=False, **options):
    """Run one campaign and return the parsed report as a dict.

    Extra keyword options (n, M, N, ell, trunc_order, tol, jobs) are
    forwarded to the campaign configuration.
    """
    cfg = {"campaign": campaign, "seeds": list(seeds)}
    cfg.update(options)
    return _json.loads(_impl.run_campaign(_json.dumps(cfg), include_timing))
