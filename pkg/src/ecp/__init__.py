"""Effective classical potential of the Coulomb problem by variational perturbation theory.

Modules: ``numerics`` (quadrature, roots, minimizers), ``correlator`` (harmonic
two-point functions), ``smearing`` (Gaussian expectation values), ``coulomb``
(W1/W2 and frequency optimization), ``groundstate`` (zero-temperature limit and
Rayleigh-Schrödinger re-expansion), ``cli`` (the ``ecp`` command).
"""

__version__ = "0.1.0"
