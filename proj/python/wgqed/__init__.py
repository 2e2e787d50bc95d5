"""Single-photon superradiance and subradiance in waveguide-coupled atom chains."""

from ._core import (
    DomainError,
    EnsembleParams,
    PreconditionError,
    TimeGrid,
    UnsupportedConfiguration,
    atoms_for_od,
    bessel_j,
    bessel_j1_zeros,
    chi_td,
    ensemble_transmission,
    find_power_minima,
    gamma_ens_t0,
    laguerre,
    laguerre_roots,
    od,
    od_linear,
    phi_heaviside,
    phi_td,
    propagate_boxcar,
    propagate_delta,
    subradiant_state,
    subradiant_times,
    timed_dicke,
    __version__,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
