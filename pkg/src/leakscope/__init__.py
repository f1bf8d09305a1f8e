"""Average information leakage and secrecy-throughput design for
finite-blocklength wiretap links with multi-antenna beamforming.

Modules
-------
specfun
    Gaussian tail and inverse, incomplete gamma, Bessel ``I``, Marcum ``Q``
    and noncentral chi-squared functions.
channel
    Fading models, beamformers, Eve's SNR laws and Bob's gain law.
leakage
    Leakage estimators (quadrature, Monte Carlo, saddle point, closed form,
    high SNR).
design
    Adaptive and non-adaptive throughput optimizers.
harness
    Scenario runner, CSV/figure output and the ``leakscope`` command line.
"""

from __future__ import annotations

__version__ = "0.1.0"

from . import channel, design, leakage, specfun  # noqa: E402

__all__ = ["specfun", "channel", "leakage", "design", "__version__"]
