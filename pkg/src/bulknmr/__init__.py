"""Classical bulk NMR spin dynamics over the collective product-operator algebra."""

__version__ = "0.1.0"

from .algebra import (  # noqa: E402
    Axis,
    ProductOperator,
    StructureTable,
    adjoint_generator,
    build_structure_table,
    commute,
    enumerate_basis,
    get_basis,
)
from .dynamics import (  # noqa: E402
    Method,
    StateVector,
    Trajectory,
    apply_rotation,
    evolve_constant,
    generator,
    run_sequence,
)
from .signal import acquire_fid, compare_spectra, spectrum  # noqa: E402
from .spinsys import (  # noqa: E402
    Acquire,
    Evolve,
    FieldMode,
    FieldSpec,
    HardPulse,
    PulseSequence,
    SpinSystem,
    hamiltonian_coeffs,
    validate_sequence,
)
from .thermal import ThermalMode, thermal_state  # noqa: E402
