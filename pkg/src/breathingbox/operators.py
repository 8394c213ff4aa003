"""Dilation and position operators over a truncated basis.

The dilation potential is i*hbar*(1 + r d/dr) on the disc and
i*hbar*(1/2 + x d/dx) on the segment; its matrix is i*hbar times a real
antisymmetric radial-integral matrix, block diagonal in m.  Cross-m
entries are structural zeros (never computed), so the angular selection
rule is exact by construction while the radial integrals carry the
numerical error.

Radial derivatives of Bessel modes come from the order recurrence, not
finite differences, keeping the quadrature spectrally accurate.  Blocks
are assembled on shared Gauss-Legendre grids with node doubling; the
element-level entry point integrates adaptively on its own.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import bessel
from .basis import BasisSet, DISC, SEGMENT
from .errors import QuadratureError
from .quadrature import QuadratureSpec, adaptive_quad, default_quadrature_spec, nodes_weights


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense Hermitian matrix over the basis mode order."""

    basis: BasisSet
    entries: np.ndarray            # complex, square, len(basis.modes)
    kind: str                      # "dilation" | "position"
    hermitian: bool = True
    block_diagonal_in_m: bool = True

    def block(self, m: int) -> np.ndarray:
        for bm, sl in self.basis.block_slices():
            if bm == m:
                return self.entries[sl, sl]
        raise KeyError(f"no m={m} block in basis")


def _disc_mode_values(m: int, wavenumbers: np.ndarray, r: np.ndarray):
    """J_m(k_n r_i) and d/dr J_m(k_n r_i) as (n, i) arrays, one recurrence."""
    x = np.outer(wavenumbers, r)
    flat = x.ravel()
    if m == 0:
        j0, j1 = bessel.bessel_j_orders((0, 1), flat)
        jm = j0.reshape(x.shape)
        jder = -j1.reshape(x.shape) * wavenumbers[:, None]
    else:
        jm1, jm, jp1 = bessel.bessel_j_orders((m - 1, m, m + 1), flat)
        jm = jm.reshape(x.shape)
        jder = 0.5 * (jm1 - jp1).reshape(x.shape) * wavenumbers[:, None]
    return jm, jder


def _disc_block_raw(m: int, wavenumbers: np.ndarray, r0: float, n_nodes: int):
    """Dilation and position integrals over one disc m-block at fixed nodes."""
    r, w = nodes_weights(0.0, r0, n_nodes)
    jm, jder = _disc_mode_values(m, wavenumbers, r)
    wr = w * r
    dil = (jm * wr) @ (jm + jder * r).T
    pos = (jm * (wr * r)) @ jm.T
    return dil, pos


def _segment_block_raw(n_max: int, length: float, n_nodes: int):
    """Dilation and |x| integrals for the segment modes (unit-normalized later)."""
    ns = np.arange(1, n_max + 1)

    def mode_vals(x):
        arg = np.outer(ns, np.pi * (x / length + 0.5))
        phi = np.sin(arg)
        dphi = np.cos(arg) * (ns[:, None] * np.pi / length)
        return phi, dphi

    half = 0.5 * length
    x, w = nodes_weights(-half, half, n_nodes)
    phi, dphi = mode_vals(x)
    dil = (phi * w) @ (0.5 * phi + dphi * x).T
    # |x| has a kink at 0: integrate the two halves separately.
    pos = np.zeros((n_max, n_max))
    for a, b in ((-half, 0.0), (0.0, half)):
        xs, ws = nodes_weights(a, b, n_nodes)
        ph, _ = mode_vals(xs)
        pos += (ph * (ws * np.abs(xs))) @ ph.T
    return dil, pos


def _assemble_block(basis: BasisSet, m: int, spec: QuadratureSpec):
    """Node-doubled assembly of one m-block's dilation and position integrals.

    Converges to a quarter of the requested tolerance so that entry
    values do not depend on the truncation through the stopping point.
    """
    modes = [mo for mo in basis.modes if mo.index.m == m]
    aleph = np.array([mo.normalization for mo in modes])
    tol = 0.25 * spec.tolerance
    size = basis.box.reference_size

    def raw(n_nodes):
        if basis.box.shape == SEGMENT:
            dil, pos = _segment_block_raw(len(modes), size, n_nodes)
        else:
            k = np.array([mo.wavenumber for mo in modes])
            dil, pos = _disc_block_raw(abs(m), k, size, n_nodes)
        outer = np.outer(aleph, aleph)   # raw integrals use bare mode functions
        return outer * dil, outer * pos

    n = spec.nodes
    dil_prev, pos_prev = raw(n)
    while n < spec.max_nodes:
        n *= 2
        dil_cur, pos_cur = raw(n)
        if (np.max(np.abs(dil_cur - dil_prev)) <= tol
                and np.max(np.abs(pos_cur - pos_prev)) <= tol):
            return dil_cur, pos_cur
        dil_prev, pos_prev = dil_cur, pos_cur
    raise QuadratureError(
        f"operators: m={m} block did not stabilize to {tol:.1e} "
        f"within {spec.max_nodes} nodes")


def _blocks_by_abs_m(basis: BasisSet, spec: QuadratureSpec):
    """Radial integrals depend on |m| only; compute each |m| once."""
    cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    for m, _ in basis.block_slices():
        am = abs(m)
        if am not in cache:
            cache[am] = _assemble_block(basis, am, spec)
    return cache


def radial_dilation_element(basis: BasisSet, m: int, n: int, nprime: int,
                            spec: QuadratureSpec | None = None) -> float:
    """Single dilation-matrix element (real part; the operator adds i*hbar).

    Disc: aleph_n aleph_n' * integral of J_m(k_n r)(1 + r d/dr)J_m(k_n' r) r dr.
    Segment: matrix element of (1/2 + x d/dx) between sine modes.
    Adaptive quadrature, independent of the batched block assembly.
    """
    spec = spec or default_quadrature_spec()
    size = basis.box.reference_size
    label = f"dilation element (m={m}, n={n}, n'={nprime})"
    if basis.box.shape == SEGMENT:
        amp = 2.0 / size

        def f(x):
            an = n * np.pi * (x / size + 0.5)
            ap = nprime * np.pi * (x / size + 0.5)
            return amp * np.sin(an) * (0.5 * np.sin(ap)
                                       + x * (nprime * np.pi / size) * np.cos(ap))

        return adaptive_quad(f, -0.5 * size, 0.5 * size, spec, label=label)
    mode_n = basis.mode(m, n)
    mode_p = basis.mode(m, nprime)
    kn, kp = mode_n.wavenumber, mode_p.wavenumber
    am = abs(m)

    def f(r):
        jn = bessel.bessel_j(am, kn * r)
        if am == 0:
            jp, j1 = bessel.bessel_j_orders((0, 1), kp * r)
            jder = -j1 * kp
        else:
            jm1, jp, jp1 = bessel.bessel_j_orders((am - 1, am, am + 1), kp * r)
            jder = 0.5 * (jm1 - jp1) * kp
        return jn * (jp + r * jder) * r

    integral = adaptive_quad(f, 0.0, size, spec, label=label)
    return mode_n.normalization * mode_p.normalization * integral


def dilation_matrix(basis: BasisSet, spec: QuadratureSpec | None = None) -> OperatorMatrix:
    """V = i*hbar * D over the full basis, D real antisymmetric per m-block."""
    spec = spec or default_quadrature_spec()
    blocks = _blocks_by_abs_m(basis, spec)
    entries = np.zeros((basis.size, basis.size), dtype=complex)
    hbar = basis.constants.hbar
    for m, sl in basis.block_slices():
        dil, _ = blocks[abs(m)]
        entries[sl, sl] = 1j * hbar * dil
    return OperatorMatrix(basis=basis, entries=entries, kind="dilation")


def position_matrix(basis: BasisSet, spec: QuadratureSpec | None = None) -> OperatorMatrix:
    """Matrix of r (disc) or |x| (segment); real, block diagonal in m."""
    spec = spec or default_quadrature_spec()
    blocks = _blocks_by_abs_m(basis, spec)
    entries = np.zeros((basis.size, basis.size), dtype=complex)
    for m, sl in basis.block_slices():
        _, pos = blocks[abs(m)]
        entries[sl, sl] = pos
    return OperatorMatrix(basis=basis, entries=entries, kind="position")
