"""Physical constants and unit helpers.

Lengths are in micrometres throughout the package unless a name says otherwise;
angular frequencies are in rad/s and propagation constants in rad/um.
"""

from dataclasses import dataclass

import numpy as np
from scipy import constants as _sc

UM = 1e-6


@dataclass(frozen=True)
class PhysicalConstants:
    c: float = _sc.c
    hbar: float = _sc.hbar
    epsilon_0: float = _sc.epsilon_0
    mu_0: float = _sc.mu_0

    @property
    def z0(self):
        """Vacuum wave impedance (ohm)."""
        return float(np.sqrt(self.mu_0 / self.epsilon_0))


CONSTANTS = PhysicalConstants()


def wavelength_to_omega(wavelength_um):
    return 2 * np.pi * CONSTANTS.c / (np.asarray(wavelength_um, dtype=float) * UM)


def omega_to_wavelength(omega):
    """Vacuum wavelength in um for angular frequency `omega` in rad/s."""
    return 2 * np.pi * CONSTANTS.c / np.asarray(omega, dtype=float) / UM


def k0_per_um(omega):
    return np.asarray(omega, dtype=float) / CONSTANTS.c * UM
