"""Matrix realizations of rational reflection data.

A reflection coefficient with poles strictly inside the upper half
plane, given by partial-fraction data (complex pole pairs at
k = i*beta +/- alpha, purely imaginary poles at k = i*omega), plus
bound states (kappa, c), is realized as a matrix triplet (A, B, C)
with A of size P x P, B a column, C a row. The rational function
itself is recovered as -i C (k I - i A)^{-1} B over the non-bound-state
blocks; the bound-state blocks contribute the discrete part of the
associated integral kernel.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import SpecValidationError


def _finite(value, name: str) -> float:
    v = float(value)
    if not np.isfinite(v):
        raise SpecValidationError(f"{name} must be finite, got {value!r}")
    return v


def _positive(value, name: str) -> float:
    v = _finite(value, name)
    if v <= 0.0:
        raise SpecValidationError(f"{name} must be positive, got {value!r}")
    return v


@dataclass(frozen=True)
class ComplexPolePair:
    """Pole pair at k = i*beta + alpha and k = i*beta - alpha.

    coefficients[s-1] = (eps_s, gamma_s) holds the order-s coefficient
    pair; the multiplicity is len(coefficients).
    """

    alpha: float
    beta: float
    coefficients: tuple[tuple[float, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "alpha", _positive(self.alpha, "alpha"))
        object.__setattr__(self, "beta", _positive(self.beta, "beta"))
        coeffs = tuple((_finite(e, "eps"), _finite(g, "gamma")) for e, g in self.coefficients)
        if not coeffs:
            raise SpecValidationError("complex pole pair needs at least one coefficient pair")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def multiplicity(self) -> int:
        return len(self.coefficients)


@dataclass(frozen=True)
class ImaginaryPole:
    """Pole at k = i*omega with real coefficients r_1 .. r_m."""

    omega: float
    coefficients: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "omega", _positive(self.omega, "omega"))
        coeffs = tuple(_finite(r, "r") for r in self.coefficients)
        if not coeffs:
            raise SpecValidationError("imaginary pole needs at least one coefficient")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def multiplicity(self) -> int:
        return len(self.coefficients)


@dataclass(frozen=True)
class BoundState:
    """Bound state with decay rate kappa and norming constant c."""

    kappa: float
    c: float

    def __post_init__(self):
        object.__setattr__(self, "kappa", _positive(self.kappa, "kappa"))
        object.__setattr__(self, "c", _positive(self.c, "c"))


@dataclass(frozen=True)
class ScatteringSpec:
    """Declarative scattering data: pole pairs, imaginary poles, bound states.

    Construction canonicalizes block order (complex pairs by (beta,
    alpha), imaginary poles by omega, bound states by kappa) and
    rejects duplicate pole locations. At least one block is required.
    """

    complex_poles: tuple[ComplexPolePair, ...] = ()
    imaginary_poles: tuple[ImaginaryPole, ...] = ()
    bound_states: tuple[BoundState, ...] = ()
    eta: float = 0.0

    def __post_init__(self):
        eta = _finite(self.eta, "eta")
        if eta < 0.0:
            raise SpecValidationError(f"eta must be nonnegative, got {self.eta!r}")
        object.__setattr__(self, "eta", eta)

        cp = tuple(sorted(self.complex_poles, key=lambda p: (p.beta, p.alpha)))
        for a, b in zip(cp, cp[1:]):
            if a.beta == b.beta and a.alpha == b.alpha:
                raise SpecValidationError(
                    f"duplicate complex pole pair at alpha={a.alpha}, beta={a.beta}")
        ip = tuple(sorted(self.imaginary_poles, key=lambda p: p.omega))
        for a, b in zip(ip, ip[1:]):
            if a.omega == b.omega:
                raise SpecValidationError(f"duplicate imaginary pole at omega={a.omega}")
        bs = tuple(sorted(self.bound_states, key=lambda s: s.kappa))
        for a, b in zip(bs, bs[1:]):
            if a.kappa == b.kappa:
                raise SpecValidationError(f"duplicate bound state at kappa={a.kappa}")
        object.__setattr__(self, "complex_poles", cp)
        object.__setattr__(self, "imaginary_poles", ip)
        object.__setattr__(self, "bound_states", bs)
        if not (cp or ip or bs):
            raise SpecValidationError(
                "empty scattering data: need at least one pole or bound state")

    @property
    def has_reflection(self) -> bool:
        return bool(self.complex_poles or self.imaginary_poles)

    @property
    def is_bound_state_only(self) -> bool:
        return not self.has_reflection

    @property
    def matrix_dimension(self) -> int:
        return (sum(2 * p.multiplicity for p in self.complex_poles)
                + sum(p.multiplicity for p in self.imaginary_poles)
                + len(self.bound_states))


@dataclass(frozen=True, eq=False)
class Triplet:
    """Realization matrices A (P x P), B (P x 1), C (1 x P) with drift eta.

    Raw triplets may carry any real matrices; use validate_triplet for
    the diagnostics that gate the non-formal solution features.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    eta: float = 0.0

    def __post_init__(self):
        a = linalg.as_matrix(self.A, "A")
        p = a.shape[0]
        if a.shape != (p, p):
            raise SpecValidationError(f"A must be square, got shape {a.shape}")
        b = np.array(self.B, dtype=float).reshape(-1)
        if b.shape != (p,):
            raise SpecValidationError(f"B must have {p} entries, got {np.shape(self.B)}")
        c = np.array(self.C, dtype=float).reshape(-1)
        if c.shape != (p,):
            raise SpecValidationError(f"C must have {p} entries, got {np.shape(self.C)}")
        if not (np.all(np.isfinite(b)) and np.all(np.isfinite(c))):
            raise SpecValidationError("B and C entries must be finite")
        eta = _finite(self.eta, "eta")
        if eta < 0.0:
            raise SpecValidationError(f"eta must be nonnegative, got {self.eta!r}")
        b = b.reshape(p, 1)
        c = c.reshape(1, p)
        for arr in (a, b, c):
            arr.setflags(write=False)
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "B", b)
        object.__setattr__(self, "C", c)
        object.__setattr__(self, "eta", eta)

    @property
    def P(self) -> int:
        return self.A.shape[0]


def _complex_pair_block(pole: ComplexPolePair) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    m = pole.multiplicity
    lam = np.array([[pole.beta, pole.alpha], [-pole.alpha, pole.beta]])
    a = np.zeros((2 * m, 2 * m))
    for s in range(m):
        a[2 * s:2 * s + 2, 2 * s:2 * s + 2] = lam
        if s + 1 < m:
            a[2 * s:2 * s + 2, 2 * s + 2:2 * s + 4] = -np.eye(2)
    b = np.zeros(2 * m)
    b[-1] = 1.0
    c = np.zeros(2 * m)
    for s in range(m):
        # order-m coefficients first, order-1 coefficients last
        eps, gam = pole.coefficients[m - 1 - s]
        c[2 * s] = 2.0 * gam
        c[2 * s + 1] = 2.0 * eps
    return a, b, c


def _imaginary_pole_block(pole: ImaginaryPole) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    m = pole.multiplicity
    a = pole.omega * np.eye(m)
    for s in range(m - 1):
        a[s, s + 1] = -1.0
    b = np.zeros(m)
    b[-1] = 1.0
    c = np.array([pole.coefficients[m - 1 - s] for s in range(m)], dtype=float)
    return a, b, c


def _assemble(blocks: list[tuple[np.ndarray, np.ndarray, np.ndarray]], eta: float) -> Triplet:
    p = sum(blk[0].shape[0] for blk in blocks)
    a = np.zeros((p, p))
    b = np.zeros(p)
    c = np.zeros(p)
    at = 0
    for blk_a, blk_b, blk_c in blocks:
        n = blk_a.shape[0]
        a[at:at + n, at:at + n] = blk_a
        b[at:at + n] = blk_b
        c[at:at + n] = blk_c
        at += n
    return Triplet(A=a, B=b, C=c, eta=eta)


def build_triplet(spec: ScatteringSpec) -> Triplet:
    """Assemble the block-diagonal realization of a full scattering spec.

    Block order matches ScatteringSpec's canonical ordering: complex pole
    pairs, then imaginary poles, then bound states. Complex pairs
    produce 2m x 2m blocks with the rotation-scaling cell on the
    diagonal and -I2 on the superdiagonal; imaginary poles produce
    m x m bidiagonal blocks; bound states produce 1 x 1 blocks
    ([kappa], 1, c).
    """
    blocks = [_complex_pair_block(p) for p in spec.complex_poles]
    blocks += [_imaginary_pole_block(p) for p in spec.imaginary_poles]
    blocks += [(np.array([[s.kappa]]), np.array([1.0]), np.array([s.c]))
               for s in spec.bound_states]
    triplet = _assemble(blocks, spec.eta)
    assert triplet.P == spec.matrix_dimension
    return triplet


def build_reflection_triplet(spec: ScatteringSpec) -> Triplet:
    """Realization restricted to the non-bound-state blocks.

    For a bound-state-only spec this is the empty 0 x 0 triplet, whose
    reflection function is identically zero.
    """
    blocks = [_complex_pair_block(p) for p in spec.complex_poles]
    blocks += [_imaginary_pole_block(p) for p in spec.imaginary_poles]
    if not blocks:
        return Triplet(A=np.zeros((0, 0)), B=np.zeros((0, 1)), C=np.zeros((1, 0)), eta=spec.eta)
    return _assemble(blocks, spec.eta)


def eval_reflection(triplet: Triplet, k: complex) -> complex:
    """Evaluate -i C (k I - i A)^{-1} B at a single complex k."""
    if triplet.P == 0:
        return 0j
    z = linalg.resolvent_apply(triplet.A, k, triplet.B)
    return complex(-1j * (triplet.C @ z)[0, 0])


def reflection_partial_fractions(spec: ScatteringSpec, k: complex) -> complex:
    """Direct partial-fraction sum of the reflection data at k.

    Independent of the realization matrices; used as the oracle the
    resolvent route is checked against.
    """
    k = complex(k)
    total = 0j
    for pole in spec.complex_poles:
        z = k - 1j * pole.beta
        for s, (eps, gam) in enumerate(pole.coefficients, start=1):
            total += (-1j) ** s * ((eps + 1j * gam) / (z - pole.alpha) ** s
                                   + (eps - 1j * gam) / (z + pole.alpha) ** s)
    for pole in spec.imaginary_poles:
        z = k - 1j * pole.omega
        for s, r in enumerate(pole.coefficients, start=1):
            total += (-1j) ** s * r / z ** s
    return total


@dataclass(frozen=True)
class TripletDiagnostics:
    """validate_triplet report: spectrum, solvability, mode flags."""

    spectrum: linalg.Spectrum
    formal_mode: bool                 # min Re(lambda) <= 0: decay arguments unavailable
    resonant_pairs: tuple[tuple[int, int, float], ...]  # |lambda_i + lambda_j| near zero
    lyapunov_solvable: bool
    notes: tuple[str, ...] = field(default=())

    @property
    def valid(self) -> bool:
        # Full guarantees need both a solvable Lyapunov system and strict
        # eigenvalue decay; formal-mode triplets are usable but not valid.
        return self.lyapunov_solvable and not self.formal_mode


RESONANCE_TOL = 1e-8


def validate_triplet(triplet: Triplet, resonance_tol: float = RESONANCE_TOL) -> TripletDiagnostics:
    """Diagnose a triplet: eigenvalues, resonances, usable modes.

    Any real (A, B, C) is accepted. formal_mode is set when some
    eigenvalue has nonpositive real part, in which case decay-based
    features (Marchenko residuals, positivity certificates) do not
    apply. A pair lambda_i + lambda_j near zero makes the Lyapunov
    system unsolvable and the triplet unusable.
    """
    if triplet.P == 0:
        return TripletDiagnostics(
            spectrum=linalg.Spectrum(np.zeros(0, complex), float("inf")),
            formal_mode=False, resonant_pairs=(), lyapunov_solvable=True)
    spectrum = linalg.eigenvalues(triplet.A)
    vals = spectrum.eigenvalues
    scale = max(1.0, float(np.max(np.abs(vals))))
    resonant = []
    for i in range(len(vals)):
        for j in range(i, len(vals)):
            mag = abs(vals[i] + vals[j])
            if mag < resonance_tol * scale:
                resonant.append((i, j, float(mag)))
    formal = spectrum.min_real_part <= 0.0
    notes = []
    if formal:
        notes.append("formal-solution mode: min Re(eigenvalue) <= 0, "
                     "decay-based checks unavailable")
    if resonant:
        notes.append("resonant eigenvalue pairs: Lyapunov system is singular")
    return TripletDiagnostics(
        spectrum=spectrum,
        formal_mode=formal,
        resonant_pairs=tuple(resonant),
        lyapunov_solvable=not resonant,
        notes=tuple(notes),
    )
