"""Kinematics of a moving-lattice conveyor.

A standing wave formed by two counter-propagating beams of wavelength
``lambda_lattice`` moves its nodes at

    v = delta_nu * lambda_lattice / 2

when the beams are mutually detuned by ``delta_nu``.  Ramping the detuning
linearly therefore gives piecewise-constant acceleration, and a full
transport is a piecewise-quadratic position profile.  The trap can drag
atoms only up to

    a_max = U0 * (2 pi / lambda_lattice) / m,

the maximum tilt the lattice potential supports before atoms spill out.

Everything in this module is plain SI (seconds, metres, Hz, kg, J); these
are closed-form kinematic formulas.  The axial coordinate grows from the
MOT towards and into the fiber, so transport into the fiber means positive
velocity and retraction negative.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import C

TWO_PI = 2.0 * math.pi


def speed_from_detuning(delta_nu: float, lambda_lattice: float) -> float:
    """Lattice node velocity (m/s) for a beam detuning ``delta_nu`` (Hz)."""
    return 0.5 * delta_nu * lambda_lattice


def detuning_from_speed(v: float, lambda_lattice: float) -> float:
    """Beam detuning (Hz) that moves the lattice nodes at ``v`` (m/s)."""
    return 2.0 * v / lambda_lattice


def max_acceleration(trap_depth: float, lambda_lattice: float, mass: float) -> float:
    """Largest acceleration (m/s^2) the lattice can impose on a trapped atom.

    Parameters
    ----------
    trap_depth : float
        Lattice potential depth U0 in joules.
    lambda_lattice : float
        Lattice wavelength in metres.
    mass : float
        Atomic mass in kg.
    """
    if trap_depth < 0.0:
        raise ValueError("trap depth must be non-negative")
    if lambda_lattice <= 0.0 or mass <= 0.0:
        raise ValueError("lattice wavelength and mass must be positive")
    return trap_depth * (TWO_PI / lambda_lattice) / mass


def doppler_single_photon(v: float, wavelength: float) -> float:
    """First-order Doppler shift (Hz) seen by an atom moving at ``v`` (m/s).

    An atom receding from the light source at positive ``v`` sees the
    carrier red-shifted, hence the minus sign.
    """
    return -v / wavelength


def spin_wave_wavelength(delta_hf: float) -> float:
    """Spatial period (m) of the stored ground-state coherence grating.

    Probe and control are co-propagating, so the coherence is written with
    wavevector mismatch dk = 2 pi * delta_hf / c; the grating period is
    c / delta_hf for a ground-state splitting ``delta_hf`` in Hz.
    """
    if delta_hf <= 0.0:
        raise ValueError("hyperfine splitting must be positive")
    return C / delta_hf


def two_photon_doppler(v: float, lambda_sw: float) -> float:
    """Residual two-photon Doppler shift (Hz) of the co-propagating pair.

    The shift is v / lambda_sw where ``lambda_sw`` is the spin-wave period;
    for co-propagating beams this is the tiny difference of the two
    single-photon shifts.  Sign follows the single-photon convention with
    the wavevector difference k_probe - k_control.
    """
    if lambda_sw <= 0.0:
        raise ValueError("spin-wave period must be positive")
    return v / lambda_sw


@dataclass(frozen=True)
class TrajectorySpec:
    """Declarative transport program: linear detuning ramps.

    ``segments`` is an ordered tuple of ``(duration_s, detuning_start_hz,
    detuning_end_hz)``.  ``direction`` flips the sign of every velocity and
    lets one program serve transport both into and out of the fiber.
    """

    segments: tuple = ()
    direction: int = 1

    def __post_init__(self):
        if self.direction not in (-1, 1):
            raise ValueError("direction must be +1 or -1")
        for seg in self.segments:
            if len(seg) != 3:
                raise ValueError("segment must be (duration, detuning_start, detuning_end)")
            if seg[0] < 0.0:
                raise ValueError("segment duration must be non-negative")

    @classmethod
    def trapezoid(cls, peak_detuning: float, t_up: float, t_hold: float,
                  t_down: float, direction: int = 1) -> "TrajectorySpec":
        """Ramp up to ``peak_detuning`` (Hz), hold, ramp back to zero."""
        segs = []
        if t_up > 0.0:
            segs.append((t_up, 0.0, peak_detuning))
        if t_hold > 0.0:
            segs.append((t_hold, peak_detuning, peak_detuning))
        if t_down > 0.0:
            segs.append((t_down, peak_detuning, 0.0))
        return cls(segments=tuple(segs), direction=direction)

    @property
    def peak_detuning(self) -> float:
        """Largest |detuning| appearing anywhere in the program (Hz)."""
        peak = 0.0
        for _, d0, d1 in self.segments:
            peak = max(peak, abs(d0), abs(d1))
        return peak

    @property
    def ramp_time(self) -> float:
        """Duration of the first segment (s); zero for an empty program."""
        return self.segments[0][0] if self.segments else 0.0


@dataclass(frozen=True)
class _Phase:
    """One constant-acceleration piece: x(t) = x0 + v0 dt + a dt^2 / 2."""

    t0: float
    t1: float
    x0: float
    v0: float
    a: float

    def eval(self, t):
        dt = t - self.t0
        x = self.x0 + self.v0 * dt + 0.5 * self.a * dt * dt
        v = self.v0 + self.a * dt
        return x, v, self.a


@dataclass(frozen=True)
class Trajectory:
    """Piecewise-analytic transport profile x(t), v(t), a(t), all SI.

    Starts at x = 0, t = 0.  Sampling outside [0, t_total] raises unless
    the clamped variants are used; the solver clamps, so a trajectory that
    ends mid-run simply leaves the medium parked at its final position.
    """

    phases: tuple = ()
    t_total: float = 0.0
    _edges: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        edges = np.array([p.t0 for p in self.phases] + [self.t_total])
        object.__setattr__(self, "_edges", edges)

    @property
    def displacement(self) -> float:
        """Net displacement over the whole program (m)."""
        if not self.phases:
            return 0.0
        x, _, _ = self.phases[-1].eval(self.phases[-1].t1)
        return x

    @property
    def final_velocity(self) -> float:
        if not self.phases:
            return 0.0
        _, v, _ = self.phases[-1].eval(self.phases[-1].t1)
        return v

    def max_abs_acceleration(self) -> float:
        return max((abs(p.a) for p in self.phases), default=0.0)

    def peak_speed(self) -> float:
        """Largest |v| over the program (m/s); exact for piecewise-linear v."""
        peak = 0.0
        for p in self.phases:
            _, v, _ = p.eval(p.t1)
            peak = max(peak, abs(p.v0), abs(v))
        return peak

    def sample(self, t: float):
        """(x, v, a) at time ``t`` in [0, t_total]; out of range raises."""
        if t < 0.0 or t > self.t_total:
            raise ValueError(f"t={t} outside trajectory domain [0, {self.t_total}]")
        return self._eval(t)

    def sample_clamped(self, t: float):
        """Like :meth:`sample` but extends beyond the domain.

        Before the program the medium rests at the origin; after it, motion
        continues uniformly at the final velocity (zero for ramp-down
        programs, so the medium simply parks).
        """
        if t <= 0.0:
            return 0.0, (self.phases[0].v0 if self.phases else 0.0), 0.0
        if t >= self.t_total:
            vf = self.final_velocity
            return self.displacement + vf * (t - self.t_total), vf, 0.0
        return self._eval(t)

    def _eval(self, t: float):
        if not self.phases:
            return 0.0, 0.0, 0.0
        idx = int(np.searchsorted(self._edges, t, side="right") - 1)
        idx = min(max(idx, 0), len(self.phases) - 1)
        return self.phases[idx].eval(t)

    def sample_array(self, t: np.ndarray):
        """Vectorised (x, v, a) over an array of times (clamped)."""
        t = np.asarray(t, dtype=float)
        x = np.empty_like(t)
        v = np.empty_like(t)
        a = np.empty_like(t)
        for i, ti in enumerate(t.ravel()):
            xi, vi, ai = self.sample_clamped(float(ti))
            x.ravel()[i] = xi
            v.ravel()[i] = vi
            a.ravel()[i] = ai
        return x, v, a


def trajectory_from_spec(spec: TrajectorySpec, lambda_lattice: float) -> Trajectory:
    """Realise a detuning program as a position trajectory.

    Each linear detuning segment maps to a constant-acceleration phase via
    v = detuning * lambda / 2.
    """
    phases = []
    t = 0.0
    x = 0.0
    for duration, d0, d1 in spec.segments:
        if duration == 0.0:
            continue
        v0 = spec.direction * speed_from_detuning(d0, lambda_lattice)
        v1 = spec.direction * speed_from_detuning(d1, lambda_lattice)
        a = (v1 - v0) / duration
        phases.append(_Phase(t0=t, t1=t + duration, x0=x, v0=v0, a=a))
        x += v0 * duration + 0.5 * a * duration * duration
        t += duration
    return Trajectory(phases=tuple(phases), t_total=t)


def plan_trapezoid(v_max: float, t_up: float, t_hold: float, t_down: float) -> Trajectory:
    """Accelerate linearly to ``v_max``, hold, decelerate back to rest.

    Net displacement is v_max * (t_hold + (t_up + t_down) / 2).  A negative
    ``v_max`` plans the mirror-image (outward) move.
    """
    for name, val in (("t_up", t_up), ("t_hold", t_hold), ("t_down", t_down)):
        if val < 0.0:
            raise ValueError(f"{name} must be non-negative")
    phases = []
    t = 0.0
    x = 0.0
    if t_up > 0.0:
        a = v_max / t_up
        phases.append(_Phase(t0=0.0, t1=t_up, x0=0.0, v0=0.0, a=a))
        x = 0.5 * v_max * t_up
        t = t_up
    if t_hold > 0.0:
        phases.append(_Phase(t0=t, t1=t + t_hold, x0=x, v0=v_max, a=0.0))
        x += v_max * t_hold
        t += t_hold
    if t_down > 0.0:
        a = -v_max / t_down
        phases.append(_Phase(t0=t, t1=t + t_down, x0=x, v0=v_max, a=a))
        x += 0.5 * v_max * t_down
        t += t_down
    return Trajectory(phases=tuple(phases), t_total=t)


def plan_distance(distance: float, v_max: float, t_ramp: float) -> Trajectory:
    """Plan a trapezoid covering ``distance`` (m) at cruise speed ``v_max``.

    Uses symmetric ramps of duration ``t_ramp``.  When the distance is too
    short to reach cruise speed the profile degrades to a triangle with the
    same ramp acceleration.  Signs of ``distance`` and ``v_max`` must agree.
    """
    if distance == 0.0:
        return Trajectory()
    if v_max == 0.0:
        raise ValueError("cruise speed must be nonzero")
    if math.copysign(1.0, distance) != math.copysign(1.0, v_max):
        raise ValueError("distance and cruise speed must have the same sign")
    t_hold = distance / v_max - t_ramp
    if t_hold >= 0.0:
        return plan_trapezoid(v_max, t_ramp, t_hold, t_ramp)
    if t_ramp <= 0.0:
        raise ValueError("triangle profile needs a positive ramp time")
    # triangle at the trapezoid's ramp acceleration: d = v_peak^2 / a
    a = abs(v_max) / t_ramp
    v_peak = math.copysign(math.sqrt(abs(distance) * a), v_max)
    t_side = abs(v_peak) / a
    return plan_trapezoid(v_peak, t_side, 0.0, t_side)


def constant_velocity(v: float, duration: float) -> Trajectory:
    """Uniform motion at ``v`` (m/s) for ``duration`` (s): a pre-accelerated belt."""
    if duration < 0.0:
        raise ValueError("duration must be non-negative")
    if duration == 0.0:
        return Trajectory()
    return Trajectory(phases=(_Phase(0.0, duration, 0.0, v, 0.0),),
                      t_total=duration)


def trajectory_sample(traj: Trajectory, t: float):
    """Functional alias for :meth:`Trajectory.sample`."""
    return traj.sample(t)


@dataclass(frozen=True)
class FeasibilityReport:
    """Outcome of an acceleration-limit check over all trajectory phases."""

    ok: bool
    limit: float                 # safety * a_max, m/s^2
    max_abs_acceleration: float
    violations: tuple = ()       # strings, one per offending phase

    def __bool__(self):
        return self.ok


def check_feasible(traj: Trajectory, a_max: float, safety: float = 0.9) -> FeasibilityReport:
    """Check every phase against the trap acceleration limit.

    Feasible iff |a| <= safety * a_max on every phase.  The default safety
    margin of 0.9 keeps planned ramps clear of the spill threshold.
    """
    if a_max <= 0.0:
        raise ValueError("a_max must be positive")
    if not 0.0 < safety <= 1.0:
        raise ValueError("safety must be in (0, 1]")
    limit = safety * a_max
    violations = []
    worst = 0.0
    for i, phase in enumerate(traj.phases):
        worst = max(worst, abs(phase.a))
        if abs(phase.a) > limit:
            violations.append(
                f"phase {i} ([{phase.t0:.6g}, {phase.t1:.6g}] s): "
                f"|a| = {abs(phase.a):.4g} m/s^2 exceeds {limit:.4g} m/s^2"
            )
    return FeasibilityReport(ok=not violations, limit=limit,
                             max_abs_acceleration=worst,
                             violations=tuple(violations))
