"""One-time calibration of the model's free constants.

The model has exactly four tuned quantities, set in this declared order and
then frozen into the default configuration:

1. ``medium.od_fiber`` = 5, the measured in-fiber optical depth (a direct
   input, nothing to fit).
2. ``medium.tau_storage`` per scenario (3.1 ms stationary, 2.6 ms
   co-moving), direct inputs as well.
3. ``medium.od_scale_length`` (x_R of the outside-fiber coupling falloff):
   chosen so that storing 1 mm outside the tip and transporting into the
   fiber yields half the efficiency of an all-in-fiber transport of equal
   duration.  Found by bisection; the ratio is monotone in x_R.
4. ``calibration.efficiency_scale``: the single overall normalisation,
   anchored so the calibrated stationary efficiency at a 5 us storage time
   equals the reference value 0.11.  This absorbs every experimental loss
   channel the 1D model does not resolve (mode matching, filtering,
   detection).

``medium.ramp_penalty_eps`` = 0.75 is a direct input too: it is the
transported-to-stationary efficiency ratio at equal storage time, which the
model reproduces by construction since the penalty is applied per ramp
pair.

Running this module as a script executes the whole procedure and prints
the constants; the shipped defaults in :mod:`storedlight.config` are the
frozen output of exactly that run.
"""

from dataclasses import dataclass

from scipy.optimize import brentq

from .config import ExperimentConfig, paper_config, with_field
from .protocols import run_store_retrieve, run_transport_inside, run_transport_interface

#: anchor for the overall efficiency normalisation
REFERENCE_EFFICIENCY = 0.11
REFERENCE_STORAGE_TIME_US = 5.0

#: inward-interface transport used for the x_R condition: start 1 mm
#: outside the tip, end 0.5 mm inside
INTERFACE_DISTANCE_MM = 1.5
INTERFACE_TARGET_RATIO = 0.5


@dataclass(frozen=True)
class CalibrationResult:
    od_scale_length: float      # mm
    efficiency_scale: float
    interface_ratio: float      # achieved inward / all-in-fiber ratio
    raw_reference_efficiency: float  # uncalibrated eta at the anchor point


def interface_ratio(cfg: ExperimentConfig,
                    distance_mm: float = INTERFACE_DISTANCE_MM) -> float:
    """Inward-interface over all-in-fiber efficiency at matched duration.

    Both runs carry one ramp pair and identical dark intervals, so the
    calibration scale, eps and the lifetime decay all cancel; what remains
    is the coupling asymmetry across the tip.
    """
    inward = run_transport_interface(cfg, "inward", [distance_mm])[0]
    t_move = inward.metadata["transport_time_us"]
    inside = run_transport_inside(cfg, t_move)
    return inward.efficiency / inside.efficiency


def calibrate_od_scale_length(cfg: ExperimentConfig,
                              target: float = INTERFACE_TARGET_RATIO,
                              bracket=(0.1, 10.0), rtol: float = 1e-3) -> float:
    """Solve interface_ratio(x_R) = target for x_R by bisection (mm)."""

    def objective(x_r: float) -> float:
        c = with_field(cfg, "medium.od_scale_length", x_r)
        return interface_ratio(c) - target

    return float(brentq(objective, bracket[0], bracket[1], rtol=rtol))


def calibrate_efficiency_scale(cfg: ExperimentConfig,
                               target: float = REFERENCE_EFFICIENCY,
                               storage_time: float = REFERENCE_STORAGE_TIME_US) -> float:
    """Scale factor mapping the raw model efficiency onto the anchor value."""
    base = with_field(cfg, "calibration.efficiency_scale", 1.0)
    raw = run_store_retrieve(base, storage_time).efficiency
    if raw <= 0.0:
        raise RuntimeError("uncalibrated reference run retrieved nothing")
    return target / raw


def run_calibration(cfg: ExperimentConfig = None, verbose: bool = False) -> CalibrationResult:
    """Execute steps 3 and 4 of the procedure on top of the direct inputs."""
    if cfg is None:
        cfg = paper_config(calibrated=False)
    x_r = calibrate_od_scale_length(cfg)
    cfg = with_field(cfg, "medium.od_scale_length", x_r)
    if verbose:
        print(f"od_scale_length_mm = {x_r:.6f}")
    achieved = interface_ratio(cfg)
    scale = calibrate_efficiency_scale(cfg)
    base = with_field(cfg, "calibration.efficiency_scale", 1.0)
    raw = run_store_retrieve(base, REFERENCE_STORAGE_TIME_US).efficiency
    if verbose:
        print(f"interface ratio at x_R: {achieved:.4f}")
        print(f"raw eta({REFERENCE_STORAGE_TIME_US} us) = {raw:.6f}")
        print(f"efficiency_scale = {scale:.6f}")
    return CalibrationResult(od_scale_length=x_r, efficiency_scale=scale,
                             interface_ratio=achieved,
                             raw_reference_efficiency=raw)


if __name__ == "__main__":  # pragma: no cover
    result = run_calibration(verbose=True)
    print(result)
