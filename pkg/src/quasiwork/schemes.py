"""The three measurement schemes and the quasiprobability reconstruction.

Everything is composed exactly the way a projective-readout experiment does
it: prepare a pure state with a gate from |0>, evolve, rotate the target
energy eigenstate onto |0>, read out the |0> population.  Three schemes
share that primitive:

* END  -- evolve the initial state, measure the final energy only.
* TPM  -- prepare each initial eigenstate |E_i(0)>, measure p(f|i), weight
          by p_i.  Classical joint distribution p_i * p(f|i).
* wTPM -- additionally prepare the normalized complement state (the "NOT i"
          outcome of a binary non-selective measurement) and form
          p_i * p(f|i) + (1 - p_i) * p(f|not-i).

The real part of the Kirkwood-Dirac quasiprobability follows from the three
tables without any ancilla:

    z[i][f] = p_tpm[i][f] - (p_wtpm[i][f] - p_end[f]) / 2

``kdq_direct`` computes q[i][f] = Tr[rho Pi_i U^dag Xi_f U] from the same
ingredients and is the oracle every reconstruction is tested against.

Tables are indexed [i][f] with labels (+, 0, -); the (-,+) transition is
cell [2][0].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import DriveParams, EnergyBasis, InitialStateSpec, energy_basis, state_vector
from .propagate import propagator_closed
from .qmath import TOL, projector_defect

__all__ = [
    "SchemeTables",
    "QuasiTable",
    "UnnormalizedState",
    "DegenerateComplement",
    "NotRankOne",
    "InvalidDistribution",
    "conditional_prob",
    "complement_state",
    "ket_from_pure",
    "tpm_table",
    "epm_table",
    "wtpm_table",
    "wtpm_nonselective",
    "scheme_tables",
    "mhq_reconstruct",
    "kdq_direct",
    "gate_to_zero",
    "run_protocol",
    "shot_noise_sample",
]

# Weight of the (p_wtpm - p_end) correction in the reconstruction.  Module
# level so the selftest mutation check can perturb it and verify that the
# reconstruction-vs-oracle equivalence test actually bites.
RECONSTRUCTION_HALF_WEIGHT = 0.5

_ZERO_KET = 1  # matrix index of the bare |0> state


class UnnormalizedState(ValueError):
    """State vector does not have unit norm."""


class DegenerateComplement(ValueError):
    """Complement state undefined because p_i is (numerically) one."""


class NotRankOne(ValueError):
    """Expected a rank-1 projector."""


class InvalidDistribution(ValueError):
    """Probability vector has negative entries or does not sum to one."""


@dataclass(frozen=True)
class SchemeTables:
    """Joint distributions of the three schemes at a common time point.

    p_tpm[i][f], p_wtpm[i][f], p_end[f], and the initial-energy populations
    p_init[i].  Energy ladders at t=0 and t ride along so downstream
    reconstructions can attach work values without re-deriving the model.
    """

    t: float
    p_tpm: np.ndarray
    p_wtpm: np.ndarray
    p_end: np.ndarray
    p_init: np.ndarray
    e_init: np.ndarray
    e_final: np.ndarray


@dataclass(frozen=True)
class QuasiTable:
    """Quasiprobability table with its energy ladders.

    ``q`` is the complex Kirkwood-Dirac table when produced by the direct
    oracle, None when the table was reconstructed from measured schemes
    (the reconstruction only reaches the real part).  ``z`` is always the
    real table.
    """

    t: float
    z: np.ndarray
    e_init: np.ndarray
    e_final: np.ndarray
    q: np.ndarray | None = None

    @property
    def magnitudes(self) -> np.ndarray:
        """|q| when the full table is known, |z| otherwise."""
        return np.abs(self.z) if self.q is None else np.abs(self.q)


def _check_unit_ket(psi) -> np.ndarray:
    v = np.asarray(psi, dtype=np.complex128)
    if v.shape != (3,):
        raise UnnormalizedState(f"expected a 3-vector, got shape {v.shape}")
    n = np.linalg.norm(v)
    if abs(n - 1.0) > 1e-9:
        raise UnnormalizedState(f"state norm {n!r} is not 1")
    return v


def ket_from_pure(rho) -> np.ndarray:
    """Extract the state vector of a pure density matrix (phase-gauged).

    The column with the largest diagonal entry fixes the gauge.
    """
    r = np.asarray(rho, dtype=np.complex128)
    purity = float(np.trace(r @ r).real)
    if abs(purity - 1.0) > 1e-8 or abs(float(np.trace(r).real) - 1.0) > 1e-8:
        raise ValueError(f"not a normalized pure state (purity {purity!r})")
    k = int(np.argmax(np.diagonal(r).real))
    return r[:, k] / np.sqrt(r[k, k].real)


def conditional_prob(psi, t: float, params: DriveParams) -> np.ndarray:
    """p(f|psi) = Tr[U |psi><psi| U^dag Xi_f(t)] over final labels (+, 0, -)."""
    v = _check_unit_ket(psi)
    u = propagator_closed(t, params).u
    basis_t = energy_basis(t, params)
    return _conditional_from_u(v, basis_t, u)


def _conditional_from_u(psi: np.ndarray, basis_t: EnergyBasis, u: np.ndarray) -> np.ndarray:
    amps = basis_t.vectors.conj().T @ (u @ psi)
    p = np.abs(amps) ** 2
    return p / p.sum()  # unit-norm input: sum is 1 up to roundoff


def complement_state(rho, i: int, basis0: EnergyBasis) -> np.ndarray:
    """Normalized projection of a pure state onto NOT-outcome-i.

    (I - Pi_i) rho (I - Pi_i) / (1 - p_i); pure in, pure out.  Raises
    DegenerateComplement when p_i is numerically one.
    """
    r = np.asarray(rho, dtype=np.complex128)
    pi = basis0.projector(i)
    p_i = float(np.trace(r @ pi).real)
    if p_i > 1.0 - 1e-9:
        raise DegenerateComplement(f"p_{i} = {p_i!r}; complement weight vanishes")
    proj = np.eye(3) - pi
    out = proj @ r @ proj
    return out / (1.0 - p_i)


def _complement_ket(psi: np.ndarray, i: int, basis0: EnergyBasis) -> np.ndarray:
    v = psi - basis0.projector(i) @ psi
    n2 = float(np.vdot(v, v).real)
    if n2 < 1e-9:  # matches the p_i > 1 - 1e-9 degeneracy contract
        raise DegenerateComplement(f"state lies entirely in outcome {i}")
    return v / np.sqrt(n2)


def epm_table(rho, t: float, params: DriveParams) -> np.ndarray:
    """End-point distribution p_end[f] = Tr[U rho U^dag Xi_f(t)]; rho may be mixed."""
    r = np.asarray(rho, dtype=np.complex128)
    u = propagator_closed(t, params).u
    basis_t = energy_basis(t, params)
    evolved = u @ r @ u.conj().T
    overlaps = basis_t.vectors.conj().T @ evolved @ basis_t.vectors
    return np.diagonal(overlaps).real.copy()


def tpm_table(rho, t: float, params: DriveParams) -> np.ndarray:
    """Two-point-measurement joint table p_i * p(f|i); rho may be mixed."""
    r = np.asarray(rho, dtype=np.complex128)
    u = propagator_closed(t, params).u
    basis0 = energy_basis(0.0, params)
    basis_t = energy_basis(t, params)
    out = np.empty((3, 3))
    for i in range(3):
        p_i = float(np.trace(r @ basis0.projector(i)).real)
        cond = _conditional_from_u(basis0.ket(i), basis_t, u)
        out[i] = p_i * cond
    return out


def wtpm_table(rho, t: float, params: DriveParams) -> np.ndarray:
    """Weak-TPM joint table from the two prepared pure states (rho pure).

    p_i * p(f|i) + (1 - p_i) * p(f|not-i); each row is a full distribution
    over f because the first step is non-selective.
    """
    return scheme_tables(rho, t, params).p_wtpm


def wtpm_nonselective(rho, t: float, params: DriveParams) -> np.ndarray:
    """Oracle route: evolve the dephased state Pi rho Pi + (I-Pi) rho (I-Pi) directly."""
    r = np.asarray(rho, dtype=np.complex128)
    u = propagator_closed(t, params).u
    basis0 = energy_basis(0.0, params)
    basis_t = energy_basis(t, params)
    eye = np.eye(3)
    out = np.empty((3, 3))
    for i in range(3):
        pi = basis0.projector(i)
        ns = pi @ r @ pi + (eye - pi) @ r @ (eye - pi)
        evolved = u @ ns @ u.conj().T
        for f in range(3):
            out[i, f] = float(np.trace(evolved @ basis_t.projector(f)).real)
    return out


def scheme_tables(
    rho,
    t: float,
    params: DriveParams,
    shots: int | None = None,
    seed=None,
) -> SchemeTables:
    """All three scheme tables for a pure state at one time point.

    Noiseless (shots=None) rows are exact Born probabilities.  With shots,
    every measured conditional distribution -- p(f|i), p(f|not-i) and the
    end-point row -- is replaced by multinomial frequencies from ``shots``
    repetitions; the composition weights p_i stay exact (they are state
    calibration constants, not per-run detector reads).
    """
    r = np.asarray(rho, dtype=np.complex128)
    psi = ket_from_pure(r)
    u = propagator_closed(t, params).u
    basis0 = energy_basis(0.0, params)
    basis_t = energy_basis(t, params)
    rng = np.random.default_rng(seed) if shots is not None else None

    p_init = np.array([float(np.trace(r @ basis0.projector(i)).real) for i in range(3)])
    # below the complement-degeneracy threshold the complement branch carries
    # weight <= 1e-9 and is dropped rather than prepared
    has_complement = 1.0 - p_init > 1e-9
    cond = np.empty((3, 3))
    cond_bar = np.zeros((3, 3))
    for i in range(3):
        cond[i] = _conditional_from_u(basis0.ket(i), basis_t, u)
        if has_complement[i]:
            cond_bar[i] = _conditional_from_u(_complement_ket(psi, i, basis0), basis_t, u)
    p_end = _conditional_from_u(psi, basis_t, u)

    if shots is not None:
        cond = np.stack([shot_noise_sample(cond[i], shots, rng) for i in range(3)])
        cond_bar = np.stack(
            [
                shot_noise_sample(cond_bar[i], shots, rng) if has_complement[i] else cond_bar[i]
                for i in range(3)
            ]
        )
        p_end = shot_noise_sample(p_end, shots, rng)

    p_tpm = p_init[:, None] * cond
    p_wtpm = p_init[:, None] * cond + (1.0 - p_init)[:, None] * cond_bar
    return SchemeTables(
        t=t,
        p_tpm=p_tpm,
        p_wtpm=p_wtpm,
        p_end=p_end,
        p_init=p_init,
        e_init=basis0.energies.copy(),
        e_final=basis_t.energies.copy(),
    )


def mhq_reconstruct(tables: SchemeTables) -> QuasiTable:
    """Real quasiprobability table from the three measured schemes."""
    z = tables.p_tpm - RECONSTRUCTION_HALF_WEIGHT * (tables.p_wtpm - tables.p_end[None, :])
    return QuasiTable(
        t=tables.t, z=z, e_init=tables.e_init.copy(), e_final=tables.e_final.copy()
    )


def kdq_direct(rho, t: float, params: DriveParams) -> QuasiTable:
    """Kirkwood-Dirac table q[i][f] = Tr[rho Pi_i(0) U^dag Xi_f(t) U].

    Literal evaluation of the defining trace; this is the oracle the
    scheme-composed reconstruction is validated against.  rho may be mixed.
    """
    r = np.asarray(rho, dtype=np.complex128)
    tr = float(np.trace(r).real)
    if abs(tr - 1.0) > 1e-9:
        raise ValueError(f"density matrix trace {tr!r} is not 1")
    u = propagator_closed(t, params).u
    basis0 = energy_basis(0.0, params)
    basis_t = energy_basis(t, params)
    q = np.empty((3, 3), dtype=np.complex128)
    for f in range(3):
        heis_f = u.conj().T @ basis_t.projector(f) @ u
        for i in range(3):
            q[i, f] = np.trace(r @ basis0.projector(i) @ heis_f)
    return QuasiTable(
        t=t,
        z=q.real.copy(),
        e_init=basis0.energies.copy(),
        e_final=basis_t.energies.copy(),
        q=q,
    )


def gate_to_zero(xi) -> np.ndarray:
    """Special-unitary gate R with R |v> proportional to |0> for Xi = |v><v|.

    Householder reflection through (v - |0>), with the input phase-gauged so
    the reflection is exact, then a global determinant-phase fix.  Raises
    NotRankOne unless Xi is a rank-1 projector.
    """
    p = np.asarray(xi, dtype=np.complex128)
    if p.shape != (3, 3) or projector_defect(p) > TOL.projector or abs(np.trace(p).real - 1.0) > 1e-9:
        raise NotRankOne("input is not a rank-1 projector")
    k = int(np.argmax(np.diagonal(p).real))
    v = p[:, k] / np.sqrt(p[k, k].real)
    # phase so the |0> component is real >= 0; then v - e1 reflects v onto e1
    if abs(v[_ZERO_KET]) > 1e-15:
        v = v * (v[_ZERO_KET].conjugate() / abs(v[_ZERO_KET]))
    e = np.zeros(3, dtype=np.complex128)
    e[_ZERO_KET] = 1.0
    w = v - e
    wn2 = float(np.vdot(w, w).real)
    if wn2 < 1e-24:
        r = np.eye(3, dtype=np.complex128)
    else:
        r = np.eye(3, dtype=np.complex128) - 2.0 * np.outer(w, w.conj()) / wn2
    det = np.linalg.det(r)
    return r * np.exp(-1j * np.angle(det) / 3.0)


def run_protocol(
    spec: InitialStateSpec,
    scheme: str,
    t: float,
    params: DriveParams,
    label: int | None = None,
    shots: int | None = None,
    seed=None,
) -> np.ndarray:
    """One measured row: gate-prepare, evolve, gate-readout, count.

    scheme is "end", "tpm" or "wtpm"; "tpm"/"wtpm" need the initial label
    index (0, 1, 2) = (+, 0, -).  Returns the corresponding scheme-table
    row: p_end for "end", p_i * p(f|i) for "tpm", the weighted two-state
    composition for "wtpm".  With ``shots`` each readout distribution is
    sampled multinomially.
    """
    if scheme not in ("end", "tpm", "wtpm"):
        raise ValueError(f"unknown scheme {scheme!r}")
    if scheme != "end" and label not in (0, 1, 2):
        raise ValueError("tpm/wtpm need label index 0, 1 or 2")
    basis0 = energy_basis(0.0, params)
    xi = state_vector(spec, basis0)
    rng = np.random.default_rng(seed) if shots is not None else None

    if scheme == "end":
        return _protocol_run(xi, t, params, shots, rng)
    p_i = float(spec.normalized_weights[label])
    cond = _protocol_run(basis0.ket(label), t, params, shots, rng)
    if scheme == "tpm":
        return p_i * cond
    if 1.0 - p_i > 1e-9:
        cond_bar = _protocol_run(_complement_ket(xi, label, basis0), t, params, shots, rng)
    else:
        cond_bar = np.zeros(3)
    return p_i * cond + (1.0 - p_i) * cond_bar


def _protocol_run(psi, t, params, shots, rng) -> np.ndarray:
    """Full gate chain for one prepared state: R_prep, U(t), readout gates."""
    prep = gate_to_zero(np.outer(psi, psi.conj())).conj().T
    zero = np.zeros(3, dtype=np.complex128)
    zero[_ZERO_KET] = 1.0
    prepared = prep @ zero
    u = propagator_closed(t, params).u
    basis_t = energy_basis(t, params)
    evolved = u @ prepared
    p = np.empty(3)
    for f in range(3):
        readout = gate_to_zero(basis_t.projector(f))
        p[f] = abs((readout @ evolved)[_ZERO_KET]) ** 2
    p = p / p.sum()
    if shots is None:
        return p
    return shot_noise_sample(p, shots, rng)


def shot_noise_sample(p, shots: int, seed=None) -> np.ndarray:
    """Multinomial outcome frequencies for ``shots`` repetitions.

    Deterministic for a given seed (or Generator).  The returned frequencies
    sum to 1.0 exactly.
    """
    if shots < 1:
        raise InvalidDistribution(f"shots must be >= 1, got {shots}")
    prob = np.asarray(p, dtype=float).copy()
    if prob.ndim != 1:
        raise InvalidDistribution(f"expected a probability vector, got shape {prob.shape}")
    if np.any(prob < -1e-9) or abs(prob.sum() - 1.0) > 1e-6:
        raise InvalidDistribution(f"not a distribution: {p}")
    prob = np.clip(prob, 0.0, None)
    prob = prob / prob.sum()
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    freq = rng.multinomial(shots, prob) / shots
    # pin the float sum to exactly 1.0 (division can round each entry)
    tail = 1.0 - freq[:-1].sum()
    if tail >= 0.0:
        freq[-1] = tail
    else:
        k = int(np.argmax(freq[:-1]))
        freq[-1] = 0.0
        freq[k] = 1.0 - (freq.sum() - freq[k])
    return freq
