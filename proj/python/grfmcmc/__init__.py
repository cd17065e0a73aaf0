"""Gibbs random field samplers, exact oracles and perturbation bounds."""

import importlib

try:
    _core = importlib.import_module("._core", __name__)
except ImportError:  # build-tree layout: the extension sits next to the package
    _core = importlib.import_module("_core")

globals().update({k: v for k, v in vars(_core).items() if not k.startswith("_")})
__version__ = _core.__version__
__all__ = [k for k in vars(_core) if not k.startswith("_")]
