"""Physical constants and the internal unit conventions.

The field-solver modules work in a scaled unit system chosen so that grid
numbers stay O(1) and the huge ratio between the vacuum speed of light and
atomic decay rates never meets the time step:

* time in microseconds (us)
* length in millimetres (mm)
* angular rates (decay rates, Rabi frequencies, detunings) in rad/us
* plain frequencies (lattice detunings, hyperfine splittings) in MHz

Mass (kg), energy (J) and temperature (K) stay SI; they enter only the
conveyor kinematics, which are closed-form SI formulas with no scale
pathology.  Conversions happen at the configuration and output boundaries,
not inside stepping loops.
"""

from dataclasses import dataclass

# CODATA exact values
C = 299792458.0          # speed of light, m/s
K_B = 1.380649e-23       # Boltzmann constant, J/K
H_PLANCK = 6.62607015e-34  # Planck constant, J s

# speed of light in internal units, mm/us
C_MM_US = C * 1e-3


@dataclass(frozen=True)
class PhysConstants:
    """Fundamental constants, SI."""

    c: float = C
    k_b: float = K_B


CONSTANTS = PhysConstants()

_TWO_PI = 6.283185307179586


def kelvin_to_joule(temperature: float) -> float:
    """Thermal energy k_B * T for a temperature in kelvin."""
    return K_B * temperature


def joule_to_kelvin(energy: float) -> float:
    """Inverse of :func:`kelvin_to_joule`."""
    return energy / K_B


def linewidth_hz_to_rad_us(f_hz: float) -> float:
    """Convert a linewidth given in Hz (cycles/s) to an angular rate in rad/us."""
    return _TWO_PI * f_hz * 1e-6


def rad_us_to_linewidth_hz(w: float) -> float:
    """Inverse of :func:`linewidth_hz_to_rad_us`."""
    return w / _TWO_PI * 1e6
