"""Geometric phase of a spin-1/2 plane wave scattered by a uniform magnetic slab."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    NEUTRON,
    ScatterParams,
    SpinState,
    UnitsBridge,
    epsilon_for_physical,
    field_for_speed,
    make_params,
    params_from_kminus,
    spin_from_angle,
)
from .geophase import (  # noqa: E402
    GpValue,
    highspeed_gp,
    open_path_gp,
    pancharatnam_oracle,
    prebarrier_gp,
    resonant_gp,
    tunnel_gp,
)
from .resonance import ResonanceSpec, resonances_for_kl, spec_from_pair  # noqa: E402
from .scattering import (  # noqa: E402
    amplitude_field,
    bloch_trajectory,
    channel_scattering,
    continuity_check,
    slab_kernels,
)
