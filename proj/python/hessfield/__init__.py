"""Augmented Hessian equation solver and structural-condition certifier."""

try:
    from ._hessfield import *  # noqa: F401,F403  (installed package layout)
except ImportError:  # build-tree layout: the extension sits on sys.path
    from _hessfield import *  # noqa: F401,F403

from ._version import __version__  # noqa: F401
