"""Axial model of the atomic medium and its decoherence budget.

The cloud is a Gaussian of 1/e half-width w along the transport axis,

    n(z) = N / (sqrt(pi) w) * exp(-((z - c) / w)^2),

so the axial integral of n is exactly the atom number.  Optical coupling is
strongest with the cloud inside the hollow-core fiber, where the guided
mode and the atoms overlap perfectly; outside the tip the probe diverges
and the usable optical depth falls off with distance d from the tip as

    scale(d) = max(floor, 1 / (1 + (d / x_r)^2)),

a Lorentzian-in-distance area factor that is continuous (scale -> 1) at the
tip.  The effective optical depth of a cloud at any position is

    OD = od_fiber * integral( n_hat(z) * scale(z) dz ),

with n_hat the unit-normalised density, so a cloud fully inside the fiber
has OD = od_fiber exactly.

Decoherence of the stored spin wave is parametric, not microscopic: an
exponential lifetime tau, a fixed penalty eps per accelerate/decelerate
pair, and an optional atom-loss rate.  All lengths here are mm and times
us, following the internal unit conventions.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad


@dataclass(frozen=True)
class CloudState:
    """Atomic cloud along the transport axis.

    atom_number      total atoms in the trap
    center           cloud centre, mm (axis points from MOT into the fiber)
    width_1e         1/e half-width of the Gaussian density, mm
    temperature_radial   radial temperature, K (bookkeeping; does not enter
                         the 1D dynamics)
    """

    atom_number: float
    center: float
    width_1e: float
    temperature_radial: float = 0.0

    def __post_init__(self):
        if self.atom_number < 0.0:
            raise ValueError("atom number must be non-negative")
        if self.width_1e <= 0.0:
            raise ValueError("cloud 1/e half-width must be positive")
        if self.temperature_radial < 0.0:
            raise ValueError("temperature must be non-negative")


@dataclass(frozen=True)
class FiberGeometry:
    """Hollow-core fiber placement on the transport axis (mm).

    The tip faces the MOT; the fiber bore occupies
    [tip_position, tip_position + length].
    """

    tip_position: float = 0.0
    length: float = 100.0
    mode_field_diameter: float = 0.042
    mot_distance: float = 6.3

    def __post_init__(self):
        if self.length <= 0.0:
            raise ValueError("fiber length must be positive")
        if self.mode_field_diameter <= 0.0:
            raise ValueError("mode field diameter must be positive")
        if self.mot_distance <= 0.0:
            raise ValueError("MOT distance must be positive")

    @property
    def far_end(self) -> float:
        return self.tip_position + self.length

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x)
        return (x >= self.tip_position) & (x <= self.far_end)


@dataclass(frozen=True)
class MediumModel:
    """Optical-depth scale and decoherence parameters.

    od_fiber             resonant optical depth of the cloud when fully
                         inside the fiber
    tau_storage          1/e lifetime of the storage *efficiency*, us
    ramp_penalty_eps     efficiency retained per accelerate/decelerate pair
                         at the reference belt speed
    od_scale_length      x_r of the outside-coupling falloff, mm (calibrated)
    od_scale_floor       lower bound of the falloff factor
    loss_rate            optional atom-loss rate, 1/us (default 0)
    scale_od_with_atom_number   when True, od_fiber is rescaled linearly by
                         atom_number / reference_atom_number
    ramp_penalty_ref_speed   belt speed at which ramp_penalty_eps applies,
                         m/s.  The per-pair penalty scales as
                         eps**(peak_speed / ref_speed) so it goes to 1
                         continuously for vanishing transport speed.
    """

    od_fiber: float = 5.0
    tau_storage: float = 3100.0
    ramp_penalty_eps: float = 0.75
    od_scale_length: float = 1.0
    od_scale_floor: float = 1e-3
    loss_rate: float = 0.0
    scale_od_with_atom_number: bool = False
    reference_atom_number: float = 1.2e5
    ramp_penalty_ref_speed: float = 0.496125

    def __post_init__(self):
        if self.od_fiber < 0.0:
            raise ValueError("od_fiber must be non-negative")
        if self.tau_storage <= 0.0:
            raise ValueError("storage lifetime must be positive")
        if not 0.0 <= self.ramp_penalty_eps <= 1.0:
            raise ValueError("ramp penalty must lie in [0, 1]")
        if self.od_scale_length <= 0.0:
            raise ValueError("od_scale_length must be positive")
        if not 0.0 <= self.od_scale_floor <= 1.0:
            raise ValueError("od_scale_floor must lie in [0, 1]")
        if self.loss_rate < 0.0:
            raise ValueError("loss rate must be non-negative")
        if self.reference_atom_number <= 0.0:
            raise ValueError("reference atom number must be positive")
        if self.ramp_penalty_ref_speed <= 0.0:
            raise ValueError("ramp penalty reference speed must be positive")

    def od_for(self, cloud: CloudState) -> float:
        """Base optical depth for ``cloud``, before the position scaling."""
        if self.scale_od_with_atom_number:
            return self.od_fiber * cloud.atom_number / self.reference_atom_number
        return self.od_fiber


@dataclass(frozen=True)
class DensityProfile:
    """Gaussian axial density tied to a :class:`CloudState`."""

    center: float
    width_1e: float
    atom_number: float

    @classmethod
    def from_cloud(cls, cloud: CloudState) -> "DensityProfile":
        return cls(center=cloud.center, width_1e=cloud.width_1e,
                   atom_number=cloud.atom_number)

    def density(self, z) -> np.ndarray:
        """Atoms per mm at ``z``; integrates to the atom number."""
        return self.atom_number * self.unit_density(z)

    def unit_density(self, z) -> np.ndarray:
        """Normalised profile with unit axial integral."""
        z = np.asarray(z, dtype=float)
        u = (z - self.center) / self.width_1e
        return np.exp(-u * u) / (math.sqrt(math.pi) * self.width_1e)


def od_scale_at(x, fiber: FiberGeometry, medium: MediumModel) -> np.ndarray:
    """Position factor of the usable optical depth, in [floor, 1].

    Unity anywhere inside the fiber bore; outside, a Lorentzian falloff in
    the distance to the nearest end with scale length ``od_scale_length``
    and lower bound ``od_scale_floor``.  Continuous at both ends of the
    bore.
    """
    x = np.asarray(x, dtype=float)
    d = np.maximum.reduce([fiber.tip_position - x, x - fiber.far_end,
                           np.zeros_like(x)])
    u = d / medium.od_scale_length
    scale = 1.0 / (1.0 + u * u)
    return np.maximum(scale, medium.od_scale_floor)


def od_density(z, cloud: CloudState, medium: MediumModel,
               center_offset: float = 0.0) -> np.ndarray:
    """Axial line density in optical-depth units, before position scaling.

    Integrates over all z to ``medium.od_for(cloud)`` regardless of where
    the cloud sits relative to the fiber.
    """
    profile = DensityProfile(center=cloud.center + center_offset,
                             width_1e=cloud.width_1e,
                             atom_number=cloud.atom_number)
    return medium.od_for(cloud) * profile.unit_density(z)


def coupling_density(z, cloud: CloudState, medium: MediumModel,
                     fiber: FiberGeometry, center_offset: float = 0.0) -> np.ndarray:
    """Coupling density rho(z) in 1/mm on grid ``z``.

    rho integrates (over all z) to the effective optical depth of the cloud
    displaced by ``center_offset``; the field solver is normalised so that
    a resonant two-level medium transmits exp(-integral rho) in energy.
    """
    return od_density(z, cloud, medium, center_offset) * od_scale_at(z, fiber, medium)


def effective_od(cloud: CloudState, medium: MediumModel, fiber: FiberGeometry,
                 center_offset: float = 0.0) -> float:
    """Effective optical depth by quadrature of the coupling density.

    Monotone in how deep the cloud sits in the fiber and equal to
    ``medium.od_for(cloud)`` once the cloud is fully inside.
    """
    center = cloud.center + center_offset
    lo = center - 10.0 * cloud.width_1e
    hi = center + 10.0 * cloud.width_1e
    # breakpoints where the integrand kinks
    pts = [p for p in (fiber.tip_position, fiber.far_end) if lo < p < hi]

    def integrand(z):
        return coupling_density(z, cloud, medium, fiber, center_offset=center_offset)

    val, _ = quad(integrand, lo, hi, points=pts or None, limit=200)
    return float(val)


def storage_decay_factor(t: float, tau: float) -> float:
    """Fraction of storage efficiency surviving a dark interval ``t``.

    Pure exponential, so factors compose: f(t1) * f(t2) = f(t1 + t2).
    """
    if tau <= 0.0:
        raise ValueError("lifetime must be positive")
    if t < 0.0:
        raise ValueError("interval must be non-negative")
    return math.exp(-t / tau)


def ramp_penalty(n_ramp_pairs: float, eps: float, speed_ratio: float = 1.0) -> float:
    """Efficiency multiplier for ``n_ramp_pairs`` accelerate/decelerate pairs.

    ``speed_ratio`` is peak belt speed over the reference speed at which
    ``eps`` was determined; the penalty interpolates continuously to 1 as
    the ramps become gentle (eps**(n * ratio)).
    """
    if n_ramp_pairs < 0:
        raise ValueError("number of ramp pairs must be non-negative")
    if not 0.0 <= eps <= 1.0:
        raise ValueError("eps must lie in [0, 1]")
    if speed_ratio < 0.0:
        raise ValueError("speed ratio must be non-negative")
    return eps ** (n_ramp_pairs * speed_ratio)
