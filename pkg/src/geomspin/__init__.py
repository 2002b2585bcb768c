"""geomspin: pulse-level synthesis and noise benchmarking of geometric
two-qubit gates for exchange-coupled spin qubits in double quantum dots."""

from .core import (PAULI_X, PAULI_Y, PAULI_Z, PiecewiseConstantHamiltonian,
                   TimeGrid, auto_steps, equal_up_to_global_phase, fidelity,
                   mat_exp, mhz, propagate, rad_per_ns_to_mhz, unitarity_defect)
from .hamiltonian import (AdiabaticFrame, DeviceParams, EffectiveBlocks,
                          ExchangeDrive, ExchangeRegimeWarning, adiabatic_angle,
                          build_lab, build_rot_rwa, effective_blocks,
                          exchange_interaction, exchange_static,
                          reconstruct_from_blocks, rotating_frame_map)
from .geometry import (ControlSchedule, PathSegment, PathSpec,
                       PhaseDecomposition, S1_FRAME, S3_FRAME,
                       SingularControlError, aa_phase, cz_path, dressed_states,
                       forward_angles, invert_controls_s1, invert_controls_s3,
                       phase_decompose, sampled_path, xy_loop)
from .gates import (CANONICAL_GATES, CalibrationError, CzCalibration,
                    ExchangeGatePlan, ExchangeScheduleHamiltonian, GateTarget,
                    LocalInvariants, MAGIC_BASIS, calibrate_cz,
                    cz_noise_factory, dynamical_not_schedule,
                    exchange_noise_factory, gate_target, invariant_trajectory,
                    local_invariants, locate_class_time, synthesize_cz,
                    synthesize_xy_gate)
from .noise import (NoiseModel, SweepGate, SweepResult, SweepRow, mc_infidelity,
                    sample_delta_j, sweep)

__version__ = "0.1.0"
