"""Colour restoration for degraded silk paintings.

The restoration runs in two stages: the luminance of the painting is enhanced by a pair
of variational autoencoders joined by a latent mapping network, then the hue is corrected
by a colour-query decoder guided by residual colour priors measured against the silk
background.
"""

from __future__ import annotations

try:
    from ._version import version as __version__
    from ._version import version_tuple as version_info
except ImportError:  # pragma: no cover - source checkout without a build
    __version__ = "0.0.0"
    version_info = (0, 0, 0)

__all__ = [
    "__version__",
    "version_info",
]
