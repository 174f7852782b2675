"""Independent brute-force verification of the protocol claims.

Everything here rebuilds the run through a second, deliberately slow path:
single- and two-qudit gates are embedded into full-register dense unitaries
by explicit Kronecker placement, measurements become diagonal projectors on
the full register (no qudit is ever dropped), and every outcome tuple is
enumerated. The reports compare this path entrywise against the stride-based
fast path, so nothing in here may import the fast implementations of the
maps it certifies; it shares only the matrix constructors for the Fourier
and XOR gates, whose entries both paths must agree on by definition.

No randomness anywhere in this module: reports are pure functions of their
inputs.
"""

from __future__ import annotations

from itertools import combinations, product
from typing import Sequence

import numpy as np

from .density import reduced_density
from .gates import qft_operator, unit_phase, xor_operator
from .protocol import (
    PARALLEL,
    SEQUENTIAL,
    apply_corrections,
    prepare_joint,
    reconstruct_parallel,
    reconstruct_sequential,
    reconstruct_step,
    split,
)
from .register import (
    QuditRegister,
    SecretAmplitudes,
    SizeCapError,
    align_phase,
    digits_of_index,
    index_of_digits,
)

# Dense checks are quadratic in register size, so they get a small cap.
ORACLE_SIZE_CAP = 2**16

STATE_TOL = 1e-12
PROB_TOL = 1e-12
FIDELITY_TOL = 1e-9


# ---- Dense building blocks --------------------------------------------------


def embed_operator(
    entries: np.ndarray, targets: Sequence[int], d: int, n: int
) -> np.ndarray:
    """Place a one- or two-qudit matrix into the full d^n x d^n unitary,
    entry by entry. Slow and obviously correct; that is the point."""
    t = len(targets)
    if entries.shape != (d**t, d**t):
        raise ValueError(f"operator shape {entries.shape} does not match d^{t}")
    dim = d**n
    full = np.zeros((dim, dim), dtype=np.complex128)
    for col in range(dim):
        digits = digits_of_index(d, n, col)
        sub_col = index_of_digits(d, [digits[p] for p in targets])
        for sub_row in range(d**t):
            row_digits = list(digits)
            for p, dig in zip(targets, digits_of_index(d, t, sub_row)):
                row_digits[p] = dig
            full[index_of_digits(d, row_digits), col] = entries[sub_row, sub_col]
    return full


def projector_diagonal(d: int, n: int, position: int, digit: int) -> np.ndarray:
    """Diagonal of the projector |digit><digit| at one position, assembled
    by Kronecker placement of one-hot and all-ones vectors."""
    diag = np.ones(1)
    for p in range(n):
        if p == position:
            hot = np.zeros(d)
            hot[digit] = 1.0
            diag = np.kron(diag, hot)
        else:
            diag = np.kron(diag, np.ones(d))
    return diag


def bob1_matrix(d: int, l: int, m: int) -> np.ndarray:
    """Dense d x d form of the first share-holder's recovery map:
    column r feeds basis state (m - r) mod d with phase exp(-2*pi*i*(m-r)*l/d)."""
    mat = np.zeros((d, d), dtype=np.complex128)
    for r in range(d):
        k = (m - r) % d
        mat[k, r] = unit_phase(d, -(k * l))
    return mat


def relabel_matrix(d: int, m: int) -> np.ndarray:
    return bob1_matrix(d, 0, m)


def phase_matrix(d: int, k_out: int) -> np.ndarray:
    return np.diag([unit_phase(d, -(j * k_out)) for j in range(d)])


def aggregated_phase_matrix(d: int, k_sum: int) -> np.ndarray:
    return np.diag([unit_phase(d, -(j * k_sum)) for j in range(d)])


def _basis_vec(d: int, digit: int) -> np.ndarray:
    vec = np.zeros(d, dtype=np.complex128)
    vec[digit] = 1.0
    return vec


def _kron_chain(parts: Sequence[np.ndarray]) -> np.ndarray:
    out = np.ones(1, dtype=np.complex128)
    for part in parts:
        out = np.kron(out, part)
    return out


def _project(vec: np.ndarray, diag: np.ndarray) -> tuple[np.ndarray, float]:
    proj = vec * diag
    prob = float(np.sum(np.abs(proj) ** 2))
    if prob <= 0.0:
        raise ValueError("projected onto a zero-probability outcome")
    return proj / np.sqrt(prob), prob


def _check_cap(d: int, n_bobs: int) -> int:
    n = n_bobs + 2
    size = d**n
    if size > ORACLE_SIZE_CAP:
        raise SizeCapError(
            f"d={d}, n={n_bobs} needs {size} amplitudes, over the oracle cap "
            f"of {ORACLE_SIZE_CAP}; shrink the grid or raise the cap"
        )
    return n


# ---- Full-protocol dense sweep ----------------------------------------------


def dense_protocol_check(
    secret: SecretAmplitudes, d: int, n_bobs: int, mode: str
) -> dict:
    """Replay the whole protocol through dense full-register unitaries,
    enumerate every outcome tuple, and compare against the fast path.

    Report fields: branch counts, min/max final fidelity, worst deviation of
    the branch probabilities from uniform, and the worst entrywise distance
    between dense and fast states (after global-phase alignment).
    """
    if mode not in (SEQUENTIAL, PARALLEL):
        raise ValueError(f"unknown mode {mode!r}")
    n = _check_cap(d, n_bobs)
    alphas = secret.alphas

    ghz = np.zeros(d ** (n_bobs + 1), dtype=np.complex128)
    for j in range(d):
        ghz[index_of_digits(d, [j] * (n_bobs + 1))] = 1.0 / np.sqrt(d)
    psi0 = np.kron(alphas, ghz)

    u_xor = embed_operator(xor_operator(d).entries, [0, n_bobs + 1], d, n)
    u_qft0 = embed_operator(qft_operator(d).entries, [0], d, n)
    psi1 = u_qft0 @ (u_xor @ psi0)

    qft_embeds = {
        pos: embed_operator(qft_operator(d).entries, [pos], d, n)
        for pos in range(2, n_bobs + 1)
    }
    phase_embeds = {
        k: embed_operator(phase_matrix(d, k), [1], d, n) for k in range(d)
    }

    fast_joint = prepare_joint(secret, n_bobs)

    split_prob_err = 0.0
    recon_prob_err = 0.0
    state_dev = 0.0
    fidelities = []
    leaves = 0

    for l, m in product(range(d), repeat=2):
        vec, p_split = _project(
            psi1,
            projector_diagonal(d, n, 0, l) * projector_diagonal(d, n, n_bobs + 1, m),
        )
        split_prob_err = max(split_prob_err, abs(p_split - 1.0 / d**2))

        vec = embed_operator(bob1_matrix(d, l, m), [1], d, n) @ vec
        for mu in range(2, n_bobs + 1):
            vec = embed_operator(relabel_matrix(d, m), [mu], d, n) @ vec

        _, fast_branch, _ = split(fast_joint, n_bobs, forced=(l, m))
        fast_qss = apply_corrections(fast_branch, l, m)
        embedded = _kron_chain([_basis_vec(d, l), fast_qss.amps, _basis_vec(d, m)])
        state_dev = max(
            state_dev, float(np.max(np.abs(align_phase(vec, embedded) - vec)))
        )

        if n_bobs == 1:
            leaf_states = [(vec, [])]
        else:
            leaf_states = []
            if mode == SEQUENTIAL:
                # party N measures first; digits recorded in party order 2..N
                stack = [(vec, [None] * (n_bobs - 1), n_bobs)]
                while stack:
                    state, digits, k_party = stack.pop()
                    w = qft_embeds[k_party] @ state
                    for k in reversed(range(d)):
                        u, p = _project(
                            w, projector_diagonal(d, n, k_party, k)
                        )
                        recon_prob_err = max(recon_prob_err, abs(p - 1.0 / d))
                        u = phase_embeds[k] @ u
                        done = list(digits)
                        done[k_party - 2] = k
                        if k_party == 2:
                            leaf_states.append((u, done))
                        else:
                            stack.append((u, done, k_party - 1))
            else:
                w = vec
                for party in range(2, n_bobs + 1):
                    w = qft_embeds[party] @ w
                stack = [(w, [])]
                while stack:
                    state, digits = stack.pop()
                    party = 2 + len(digits)
                    for k in reversed(range(d)):
                        u, p = _project(
                            state, projector_diagonal(d, n, party, k)
                        )
                        recon_prob_err = max(recon_prob_err, abs(p - 1.0 / d))
                        done = digits + [k]
                        if party == n_bobs:
                            k_sum = sum(done) % d
                            u = (
                                embed_operator(
                                    aggregated_phase_matrix(d, k_sum), [1], d, n
                                )
                                @ u
                            )
                            leaf_states.append((u, done))
                        else:
                            stack.append((u, done))

        for final_vec, digits in leaf_states:
            leaves += 1
            target = _kron_chain(
                [_basis_vec(d, l), alphas]
                + [_basis_vec(d, k) for k in digits]
                + [_basis_vec(d, m)]
            )
            fidelities.append(float(abs(np.vdot(target, final_vec)) ** 2))

            if mode == SEQUENTIAL:
                fast_final, _, _ = reconstruct_sequential(fast_qss, forced=digits)
            else:
                fast_final, _, _ = reconstruct_parallel(fast_qss, forced=digits)
            fast_embedded = _kron_chain(
                [_basis_vec(d, l), fast_final.amps]
                + [_basis_vec(d, k) for k in digits]
                + [_basis_vec(d, m)]
            )
            state_dev = max(
                state_dev,
                float(np.max(np.abs(align_phase(final_vec, fast_embedded) - final_vec))),
            )

    min_fid = min(fidelities)
    max_fid = max(fidelities)
    passed = (
        min_fid >= 1.0 - FIDELITY_TOL
        and split_prob_err <= PROB_TOL
        and recon_prob_err <= PROB_TOL
        and state_dev <= STATE_TOL
    )
    return {
        "check": "dense_protocol",
        "d": d,
        "n": n_bobs,
        "mode": mode,
        "branches": leaves,
        "min_fidelity": min_fid,
        "max_fidelity": max_fid,
        "split_probability_error": split_prob_err,
        "recon_probability_error": recon_prob_err,
        "max_state_deviation": state_dev,
        "passed": bool(passed),
    }


# ---- Two-level literal fixtures ----------------------------------------------


def qubit_fixture_check(a: complex, b: complex) -> dict:
    """Check the two-level walkthrough literally for a secret a|0> + b|1>
    shared between two parties.

    The four post-measurement branch states must be a|00>+b|11>, a|11>+b|00>,
    a|00>-b|11>, a|11>-b|00> for outcomes (0,0), (0,1), (1,0), (1,1), and the
    two post-Hadamard reconstruction branches must be a|0>+b|1> and a|0>-b|1>,
    each up to a global phase.
    """
    a = complex(a)
    b = complex(b)
    if abs(abs(a) ** 2 + abs(b) ** 2 - 1.0) > 1e-9:
        raise ValueError("secret amplitudes must satisfy |a|^2+|b|^2=1")
    secret = SecretAmplitudes(2, [a, b])
    expected_branches = {
        (0, 0): np.array([a, 0, 0, b]),
        (0, 1): np.array([b, 0, 0, a]),
        (1, 0): np.array([a, 0, 0, -b]),
        (1, 1): np.array([-b, 0, 0, a]),
    }
    joint = prepare_joint(secret, 2)
    dev = 0.0
    qss = None
    for (l, m), expected in expected_branches.items():
        _, branch, _ = split(joint, 2, forced=(l, m))
        aligned = align_phase(expected, branch.amps)
        dev = max(dev, float(np.max(np.abs(aligned - expected))))
        if (l, m) == (0, 0):
            qss = apply_corrections(branch, l, m)

    # Hadamard on the second share, then both measurement outcomes; these
    # are the branches before the first share-holder's phase recovery.
    expected_after = {
        0: np.array([a, b]),
        1: np.array([a, -b]),
    }
    rotated = apply_local(qss, qft_operator(2), [1])
    for k2, expected in expected_after.items():
        collapsed, _ = collapse(rotated, [1], [k2])
        aligned = align_phase(expected, collapsed.amps)
        dev = max(dev, float(np.max(np.abs(aligned - expected))))

    return {
        "check": "qubit_fixtures",
        "max_deviation": dev,
        "passed": bool(dev <= STATE_TOL),
    }


# ---- Marginal sweep -----------------------------------------------------------


def dense_partial_trace(
    rho_full: np.ndarray, d: int, n: int, keep: Sequence[int]
) -> np.ndarray:
    """Partial trace by explicit basis-label bookkeeping over the full
    density matrix; the independent counterpart of density.reduced_density."""
    keep = list(keep)
    traced = [p for p in range(n) if p not in keep]
    s = len(keep)
    out = np.zeros((d**s, d**s), dtype=np.complex128)
    for r in range(d**s):
        r_digits = digits_of_index(d, s, r)
        for c in range(d**s):
            c_digits = digits_of_index(d, s, c)
            total = 0.0 + 0.0j
            for t in range(d ** len(traced)) if traced else [0]:
                t_digits = digits_of_index(d, len(traced), t) if traced else []
                row = [0] * n
                col = [0] * n
                for pos, dig in zip(keep, r_digits):
                    row[pos] = dig
                for pos, dig in zip(keep, c_digits):
                    col[pos] = dig
                for pos, dig in zip(traced, t_digits):
                    row[pos] = dig
                    col[pos] = dig
                total += rho_full[index_of_digits(d, row), index_of_digits(d, col)]
            out[r, c] = total
    return out


def marginal_sweep(secret: SecretAmplitudes, d: int, n_bobs: int) -> dict:
    """For every shared-state size K in 2..N and every nonempty strict party
    subset, assert the subset's marginal is the diagonal of squared secret
    magnitudes on the all-equal-digit entries, via both the explicit trace
    and the fast reduced-density path."""
    if secret.d != d:
        raise ValueError(f"secret has d={secret.d}, sweep asked for d={d}")
    _check_cap(d, n_bobs)
    dev = 0.0
    subsets = 0
    for k_parties in range(2, n_bobs + 1):
        psi = np.zeros(d**k_parties, dtype=np.complex128)
        for k in range(d):
            psi[index_of_digits(d, [k] * k_parties)] = secret.alphas[k]
        rho_full = np.outer(psi, psi.conj())
        reg = QuditRegister(d, k_parties, psi)
        for size in range(1, k_parties):
            for keep in combinations(range(k_parties), size):
                subsets += 1
                expected = np.zeros((d**size, d**size), dtype=np.complex128)
                for k in range(d):
                    idx = index_of_digits(d, [k] * size)
                    expected[idx, idx] = abs(secret.alphas[k]) ** 2
                slow = dense_partial_trace(rho_full, d, k_parties, keep)
                fast = reduced_density(reg, keep).entries
                dev = max(dev, float(np.max(np.abs(slow - expected))))
                dev = max(dev, float(np.max(np.abs(fast - expected))))
                off = slow - np.diag(np.diag(slow))
                dev = max(dev, float(np.max(np.abs(off))))
    return {
        "check": "marginal_sweep",
        "d": d,
        "n": n_bobs,
        "subsets": subsets,
        "max_deviation": dev,
        "passed": bool(dev <= STATE_TOL),
    }
