"""Dark- and bright-polariton view of the solver fields.

Read-only diagnostics: nothing here feeds back into the integration.  For
a coupling density rho(z) (1/mm) the local collective coupling is

    G(z) = sqrt(c * gamma * rho(z)),

which makes the narrowband group delay through the medium equal to
OD * gamma / Wc^2, matching the solver's transfer function.  The mixing
angle is tan(theta) = G / Wc, the group velocity v_g = c cos^2(theta), and
with the normalised spin wave S_hat = G S the dark/bright pair

    psi = cos(theta) E - sin(theta) S_hat
    phi = sin(theta) E + cos(theta) S_hat

is an orthogonal rotation, so |psi|^2 + |phi|^2 = |E|^2 + |S_hat|^2
pointwise.  On EIT resonance the adiabatic dark state has phi = 0.

Units are internal (rad/us, mm); pass SI values consistently and the
formulas hold unchanged.
"""

import math
from dataclasses import dataclass

import numpy as np

from .constants import C_MM_US


def mixing_angle(coupling, control_rabi):
    """theta = atan2(G, Wc) in [0, pi/2] for non-negative arguments.

    G and Wc must share one unit.  Both zero is undefined and raises.
    """
    coupling = np.asarray(coupling, dtype=float)
    control = np.asarray(control_rabi, dtype=float)
    if np.any((coupling == 0.0) & (control == 0.0)):
        raise ValueError("mixing angle undefined: coupling and control both zero")
    return np.arctan2(coupling, control)[()]


def group_velocity(theta, c: float = C_MM_US):
    """Polariton group velocity c * cos^2(theta), in the units of ``c``."""
    return c * np.cos(np.asarray(theta, dtype=float)) ** 2


def collective_coupling(od: float, length: float, gamma: float,
                        c: float = C_MM_US) -> float:
    """G for a medium of optical depth ``od`` spread over ``length``.

    G = sqrt(c * gamma * od / length); with the defaults, length in mm and
    gamma in rad/us give G in rad/us.
    """
    if od < 0.0:
        raise ValueError("optical depth must be non-negative")
    if length <= 0.0:
        raise ValueError("length must be positive")
    return math.sqrt(c * gamma * od / length)


def local_coupling(coupling_density, gamma: float, c: float = C_MM_US) -> np.ndarray:
    """G(z) = sqrt(c * gamma * rho(z)) for a coupling-density array."""
    rho = np.asarray(coupling_density, dtype=float)
    if np.any(rho < 0.0):
        raise ValueError("coupling density must be non-negative")
    return np.sqrt(c * gamma * rho)


def normalize_spin_wave(s, coupling_density, gamma: float,
                        c: float = C_MM_US) -> np.ndarray:
    """S_hat(z) = G(z) S(z), the spin wave in field-normalised units."""
    s = np.asarray(s)
    g = local_coupling(coupling_density, gamma, c)
    if s.shape != g.shape:
        raise ValueError("spin wave and coupling density must share the grid")
    return g * s


def dark_bright_transform(e, s_hat, theta):
    """Rotate (E, S_hat) into the dark/bright pair (psi, phi).

    ``theta`` may be a scalar or a per-point array; shapes must broadcast
    exactly onto the field grid.
    """
    e = np.asarray(e)
    s_hat = np.asarray(s_hat)
    if e.shape != s_hat.shape:
        raise ValueError("field arrays must share the grid")
    th = np.asarray(theta, dtype=float)
    if th.ndim > 0 and th.shape != e.shape:
        raise ValueError("theta array must match the field grid")
    cos, sin = np.cos(th), np.sin(th)
    psi = cos * e - sin * s_hat
    phi = sin * e + cos * s_hat
    return psi, phi


def inverse_dark_bright_transform(psi, phi, theta):
    """Invert :func:`dark_bright_transform` (transpose of the rotation)."""
    psi = np.asarray(psi)
    phi = np.asarray(phi)
    if psi.shape != phi.shape:
        raise ValueError("field arrays must share the grid")
    th = np.asarray(theta, dtype=float)
    cos, sin = np.cos(th), np.sin(th)
    e = cos * psi + sin * phi
    s_hat = -sin * psi + cos * phi
    return e, s_hat


@dataclass(frozen=True)
class PolaritonView:
    """Diagnostic decomposition of one field snapshot."""

    z: np.ndarray
    theta: np.ndarray       # local mixing angle
    psi: np.ndarray         # dark component
    phi: np.ndarray         # bright component
    v_g: np.ndarray         # local group velocity, mm/us

    def norm(self) -> float:
        """Axial integral of |psi|^2 + |phi|^2."""
        mag = np.abs(self.psi) ** 2 + np.abs(self.phi) ** 2
        return float(np.trapezoid(mag, self.z))

    def dark_norm(self) -> float:
        return float(np.trapezoid(np.abs(self.psi) ** 2, self.z))


def polariton_view(state, coupling_density, control_rabi: float,
                   gamma: float) -> PolaritonView:
    """Build a :class:`PolaritonView` from a solver :class:`FieldState`."""
    g = local_coupling(coupling_density, gamma)
    if g.shape != state.e.shape:
        raise ValueError("coupling density must live on the snapshot grid")
    if control_rabi == 0.0 and np.any(g == 0.0):
        # photonic limit where the medium vanishes: theta = 0 there
        theta = np.where(g > 0.0, np.arctan2(g, control_rabi), 0.0)
    else:
        theta = np.arctan2(g, control_rabi)
    s_hat = g * state.s
    psi, phi = dark_bright_transform(state.e, s_hat, theta)
    return PolaritonView(z=state.z, theta=theta, psi=psi, phi=phi,
                         v_g=group_velocity(theta))
