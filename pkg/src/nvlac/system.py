"""Physical parameters and assembly of the 18-level center Hamiltonian.

The model couples an electron spin 1 to a spin-1/2 and a spin-1 nucleus:

    H = D Sz^2 + ge B.S + gn1 B.I1 + gn2 B.I2 + P I2z^2 + S.A1.I1 + S.A2.I2

Units contract: Hamiltonians are stored in MHz, magnetic fields in gauss,
times in microseconds, and every propagator applies the angular factor as
exp(-i 2 pi H t). The composite basis is electron (x) spin-1/2 nucleus (x)
spin-1 nucleus, each factor ordered by descending magnetic quantum number.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidArgumentError
from .operators import embed, is_hermitian, spin_operators

DIMS = (3, 2, 3)
DIM = 18


def _default_a1() -> np.ndarray:
    return np.array([[189.3, 0.0, 24.1],
                     [0.0, 128.4, 0.0],
                     [24.1, 0.0, 128.9]])


def _default_a2() -> np.ndarray:
    return np.diag([-2.6, -2.6, -2.3])


@dataclass(frozen=True)
class SpinSystemParams:
    """Constants of the center Hamiltonian.

    d: zero-field splitting, MHz. p: quadrupolar splitting of the spin-1
    nucleus, MHz. gamma_e, gamma_n1, gamma_n2: gyromagnetic ratios, MHz/G.
    a1, a2: symmetric 3x3 hyperfine tensors, MHz. Instances are treated as
    immutable; do not mutate the tensor arrays in place.
    """
    d: float = 2870.2
    p: float = -4.95
    gamma_e: float = 2.8025
    gamma_n1: float = 1.0705e-3
    gamma_n2: float = 3.077e-4
    a1: np.ndarray = field(default_factory=_default_a1)
    a2: np.ndarray = field(default_factory=_default_a2)

    def __post_init__(self):
        for name in ("a1", "a2"):
            t = np.asarray(getattr(self, name), dtype=float)
            if t.shape != (3, 3):
                raise InvalidArgumentError(name + " must be a 3x3 tensor")
            if not np.allclose(t, t.T, atol=1e-12):
                raise InvalidArgumentError(name + " must be symmetric")
            object.__setattr__(self, name, t)


@dataclass(frozen=True)
class FieldSpec:
    """Static magnetic field: magnitude in gauss, polar angles in degrees."""
    b: float = 28.9
    theta: float = 38.4
    phi: float = 0.0

    def __post_init__(self):
        if self.b < 0:
            raise InvalidArgumentError("field magnitude must be non-negative")
        if not 0.0 <= self.theta <= 180.0:
            raise InvalidArgumentError("theta must lie in [0, 180] degrees")
        if not 0.0 <= self.phi < 360.0:
            raise InvalidArgumentError("phi must lie in [0, 360) degrees")


def field_vector(fld: FieldSpec) -> np.ndarray:
    """Cartesian field components B (sin t cos p, sin t sin p, cos t) in gauss."""
    t = np.deg2rad(fld.theta)
    p = np.deg2rad(fld.phi)
    return fld.b * np.array([np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)])


# Embedded single-spin operators on the full space, built once.
ELECTRON = tuple(embed(o, 0, DIMS) for o in spin_operators(3))
NUCLEUS1 = tuple(embed(o, 1, DIMS) for o in spin_operators(2))
NUCLEUS2 = tuple(embed(o, 2, DIMS) for o in spin_operators(3))


def build_hamiltonian(params: SpinSystemParams, fld: FieldSpec) -> np.ndarray:
    """Assemble the full 18x18 Hamiltonian in MHz."""
    b = field_vector(fld)
    sz, i2z = ELECTRON[2], NUCLEUS2[2]
    h = params.d * (sz @ sz) + params.p * (i2z @ i2z)
    for i in range(3):
        h = h + (params.gamma_e * b[i] * ELECTRON[i]
                 + params.gamma_n1 * b[i] * NUCLEUS1[i]
                 + params.gamma_n2 * b[i] * NUCLEUS2[i])
        for k in range(3):
            if params.a1[i, k] != 0.0:
                h = h + params.a1[i, k] * (ELECTRON[i] @ NUCLEUS1[k])
            if params.a2[i, k] != 0.0:
                h = h + params.a2[i, k] * (ELECTRON[i] @ NUCLEUS2[k])
    if not is_hermitian(h, 1e-12):
        raise InvalidArgumentError("assembled Hamiltonian is not Hermitian")
    return h


# Flat key-value serialization of the parameter set. Only the tensor entries
# that can be nonzero in this model are exposed.
_SCALAR_KEYS = {"D": "d", "P": "p", "gamma_e": "gamma_e",
                "gamma_n1": "gamma_n1", "gamma_n2": "gamma_n2"}
_TENSOR_KEYS = {"A1xx": ("a1", 0, 0), "A1yy": ("a1", 1, 1), "A1zz": ("a1", 2, 2),
                "A1xz": ("a1", 0, 2),
                "A2xx": ("a2", 0, 0), "A2yy": ("a2", 1, 1), "A2zz": ("a2", 2, 2)}


def params_to_items(params: SpinSystemParams) -> dict:
    """Flatten a parameter set to the documented key-value form."""
    out = {key: getattr(params, attr) for key, attr in _SCALAR_KEYS.items()}
    for key, (attr, i, k) in _TENSOR_KEYS.items():
        out[key] = float(getattr(params, attr)[i, k])
    return out


def params_from_items(items: dict, base: SpinSystemParams | None = None) -> SpinSystemParams:
    """Build a parameter set from key-value overrides on top of `base`."""
    params = base if base is not None else SpinSystemParams()
    scalars = {}
    a1 = params.a1.copy()
    a2 = params.a2.copy()
    tensors = {"a1": a1, "a2": a2}
    for key, value in items.items():
        if key in _SCALAR_KEYS:
            scalars[_SCALAR_KEYS[key]] = float(value)
        elif key in _TENSOR_KEYS:
            attr, i, k = _TENSOR_KEYS[key]
            tensors[attr][i, k] = float(value)
            tensors[attr][k, i] = float(value)  # keep the tensor symmetric
        else:
            raise InvalidArgumentError("unknown system parameter key: " + key)
    return replace(params, a1=a1, a2=a2, **scalars)
