"""Photon-pair generation in periodically poled ring-core fibers.

Modules
-------
materials   Sellmeier dispersion and the layered permittivity profile
modes       multilayer Bessel transfer-matrix mode solver
oam         circular (OAM) combinations of even/odd modes
qpm         phase mismatch, chi(2) grating spectrum, period design
spdc        overlaps, two-photon coefficients, densities, rates
oracle      independent reference solvers
config, pipeline, cli   configuration-driven runs
"""

__version__ = "0.1.0"
