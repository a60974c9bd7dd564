"""Shared fixtures: reference triplets, closed forms, random spec families."""
from __future__ import annotations

import numpy as np

from kdvexact import BoundState, ComplexPolePair, ImaginaryPole, ScatteringSpec, Triplet

S3 = np.sqrt(3.0)


def rotation_triplet(eps: float, gam: float, eta: float = 0.0) -> Triplet:
    """2x2 rotation-generator triplet with a single conjugate pole pair.

    Eigenvalues 1/2 +- i sqrt(3)/2; the coefficient pair (eps, gam)
    enters only through C.
    """
    a = np.array([[0.5, -S3 / 2], [S3 / 2, 0.5]])
    return Triplet(A=a, B=np.array([0.0, 1.0]), C=np.array([2 * gam, 2 * eps]), eta=eta)


def rotation_spec(eps: float, gam: float, eta: float = 0.0) -> ScatteringSpec:
    """Pole-data form of the same family: one simple pair at sqrt(3)/2 + i/2."""
    pair = ComplexPolePair(alpha=S3 / 2, beta=0.5, coefficients=((eps, gam),))
    return ScatteringSpec(complex_poles=(pair,), eta=eta)


def rotation_det_reference(x, t, eps: float, gam: float, eta: float):
    """Closed-form det Gamma for rotation_triplet, any eps/gam/eta."""
    phase = S3 * eta * t - S3 * x
    return (1.0 - 0.75 * (eps ** 2 + gam ** 2) * np.exp(2 * (eta - 8) * t - 2 * x)
            + 0.5 * np.exp((eta - 8) * t - x) * ((S3 * eps - gam) * np.sin(phase)
                                                 + (eps + S3 * gam) * np.cos(phase)))


def rotation_u_reference(x, t):
    """Closed-form u for rotation_triplet(1/2, 1/2, eta=1)."""
    g = np.exp(-(x + 7 * t))
    arg = S3 * (x - t)
    phi = (6 * g ** 2 - 4 * np.sqrt(2) * g * np.sin(arg - np.pi / 12)
           - (3 / np.sqrt(2)) * g ** 3 * np.sin(arg + np.pi / 4))
    den = 1 - (3 / 8) * g ** 2 + (1 / np.sqrt(2)) * g * np.cos(arg + np.pi / 12)
    return phi / den ** 2


def rotation_omega_reference(y, eps: float, gam: float):
    """Closed-form Omega(y; t=0) for rotation_triplet."""
    return 2.0 * np.exp(-y / 2) * (gam * np.sin(S3 * y / 2) + eps * np.cos(S3 * y / 2))


def three_block_triplet(eta: float = 1.0) -> Triplet:
    """Rotation pair (eps = gam = 1/2) augmented with a kappa = 2, c = 3 bound state."""
    a = np.array([[0.5, -S3 / 2, 0.0], [S3 / 2, 0.5, 0.0], [0.0, 0.0, 2.0]])
    return Triplet(A=a, B=np.array([0.0, 1.0, 1.0]), C=np.array([1.0, 1.0, 3.0]), eta=eta)


def three_block_spec(eta: float = 1.0) -> ScatteringSpec:
    pair = ComplexPolePair(alpha=S3 / 2, beta=0.5, coefficients=((0.5, 0.5),))
    return ScatteringSpec(complex_poles=(pair,),
                          bound_states=(BoundState(kappa=2.0, c=3.0),),
                          eta=eta)


def one_soliton_u(x, t, kappa: float, c: float, eta: float = 0.0):
    """Single bound state: u = -8 kappa^2 g / (1 + g)^2."""
    g = (c / (2 * kappa)) * np.exp(-2 * kappa * x + (8 * kappa ** 3 + 2 * eta * kappa) * t)
    return -8 * kappa ** 2 * g / (1 + g) ** 2


def random_calm_spec(rng: np.random.Generator) -> ScatteringSpec:
    """Random validated spec kept well away from blow-up and overflow.

    Small reflection coefficients, eigenvalue real parts in (0.4, 1.1),
    bound-state rates separated by at least 0.1 so the direct N-soliton
    determinant stays well conditioned.
    """
    n_pairs = int(rng.integers(0, 2))
    n_bound = int(rng.integers(1, 4 - n_pairs))
    cps = tuple(ComplexPolePair(alpha=float(rng.uniform(0.4, 1.1)),
                                beta=float(rng.uniform(0.4, 0.9)),
                                coefficients=((float(rng.uniform(0.05, 0.3)),
                                               float(rng.uniform(0.05, 0.3))),))
                for _ in range(n_pairs))
    kappas = np.sort(rng.uniform(0.45, 0.85, size=n_bound))
    while np.any(np.diff(kappas) < 0.1):
        kappas = np.sort(rng.uniform(0.45, 0.85, size=n_bound))
    bss = tuple(BoundState(kappa=float(k), c=float(rng.uniform(0.5, 2.0)))
                for k in kappas)
    return ScatteringSpec(complex_poles=cps, bound_states=bss,
                          eta=float(rng.choice([0.0, 4.0, 8.0])))
