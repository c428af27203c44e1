"""storedlight: EIT light storage and conveyor-belt transport of stored light.

A 1D weak-probe Maxwell-Bloch model of a cold-atom ensemble coupled to a
hollow-core fiber: pulses are stored as a collective spin wave, optionally
transported by a moving optical lattice (inside the fiber, across the tip,
or written and read in a co-moving medium), and retrieved.  Includes
conveyor kinematics and feasibility checks, polariton diagnostics, scripted
protocols with efficiency extraction and lifetime fitting, and a CLI.
"""

__version__ = "0.1.0"

from .config import (AtomSpecies, CalibrationConstants, ConfigError,
                     ConfigParseError, ConfigSchemaError, ConfigUnitError,
                     ControlSettings, ExperimentConfig, LatticeConfig,
                     NumericsConfig, ValidationReport, Violation,
                     config_from_dict, load_config, paper_config, save_config,
                     serialize_config, validate_config, with_field)
from .constants import C, C_MM_US, CONSTANTS, K_B, PhysConstants
from .conveyor import (FeasibilityReport, Trajectory, TrajectorySpec,
                       check_feasible, constant_velocity, detuning_from_speed,
                       doppler_single_photon, max_acceleration, plan_distance,
                       plan_trapezoid, speed_from_detuning,
                       spin_wave_wavelength, trajectory_from_spec,
                       trajectory_sample, two_photon_doppler)
from .dynamics import (AdvectionClipWarning, ControlSchedule, FieldState,
                       ProbePulse, ResolutionError, SolverError, TimeSeries,
                       advect_spin_wave, apply_transfer_function, group_delay,
                       output_pulse_energy, simulate,
                       steady_state_transmission, transfer_function)
from .medium import (CloudState, DensityProfile, FiberGeometry, MediumModel,
                     coupling_density, effective_od, od_density, od_scale_at,
                     ramp_penalty, storage_decay_factor)
from .polariton import (PolaritonView, collective_coupling,
                        dark_bright_transform, group_velocity,
                        inverse_dark_bright_transform, local_coupling,
                        mixing_angle, normalize_spin_wave, polariton_view)
from .protocols import (PROTOCOLS, EfficiencyPoint, FitResult,
                        InfeasibleTrajectoryError, ProtocolError,
                        ProtocolResult, add_efficiency_noise, fit_exponential,
                        run_comoving, run_store_retrieve,
                        run_transport_inside, run_transport_interface,
                        storage_efficiency, sweep)
from .calibration import (CalibrationResult, calibrate_efficiency_scale,
                          calibrate_od_scale_length, interface_ratio,
                          run_calibration)
from .outputs import (RunManifest, config_hash, read_points_csv,
                      resolve_out_dir, write_events, write_json,
                      write_manifest, write_snapshots, write_sweep_table,
                      write_time_series)
