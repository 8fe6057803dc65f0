"""Pure numpy/scipy reference implementations of the hot kernels.

Selected automatically when the compiled extension is unavailable; also
serves as the correctness oracle for the compiled version in the test
suite and in ``benchmarks/bench_kernels.py``.
"""
import numpy as np
from scipy.linalg import solve_banded

__all__ = [
    "trisolve",
    "sturm_count_below",
    "march_half_bound",
    "cn_step_loop",
]


def trisolve(dl, d, du, b):
    """Solve the tridiagonal system with sub/main/super diagonals dl, d, du.

    dl and du have length n-1.  Complex or real input; returns the solution
    as a new array.
    """
    n = d.shape[0]
    dtype = np.result_type(dl, d, du, b, np.float64)
    ab = np.zeros((3, n), dtype=dtype)
    ab[0, 1:] = du
    ab[1, :] = d
    ab[2, :-1] = dl
    return solve_banded((1, 1), ab, b)


def sturm_count_below(d, e, sigma):
    """Number of eigenvalues of the symmetric tridiagonal matrix below sigma.

    d is the diagonal (length n), e the off-diagonal (length n-1).  Uses the
    standard Sturm sequence with a safeguarded pivot.
    """
    n = d.shape[0]
    count = 0
    q = d[0] - sigma
    if q < 0.0:
        count += 1
    tiny = np.finfo(np.float64).tiny
    for i in range(1, n):
        if q == 0.0:
            q = tiny
        q = (d[i] - sigma) - e[i - 1] * e[i - 1] / q
        if q < 0.0:
            count += 1
    return count


def march_half_bound(v, h, from_right):
    """March the zero-energy solution eta'' = V eta across the grid.

    Trapezoidal (Crank-Nicolson) one-step scheme on the first-order system
    (eta, eta'), with the potential averaged over the step so the one-step
    map has unit determinant and the discrete Wronskian of two solutions is
    conserved exactly.  Initial data eta=1, eta'=0 at the starting end,
    where the potential vanishes.  Returns (eta, deta) at every node.
    """
    n = v.shape[0]
    eta = np.empty(n)
    deta = np.empty(n)
    if from_right:
        idx = range(n - 1, 0, -1)
        start = n - 1
        step = -1
    else:
        idx = range(0, n - 1)
        start = 0
        step = 1
    eta[start] = 1.0
    deta[start] = 0.0
    hh = 0.5 * h * step
    for j in idx:
        jn = j + step
        # (I - hh*Fbar) y_{jn} = (I + hh*Fbar) y_j, Fbar = [[0,1],[vbar,0]]
        vbar = 0.5 * (v[j] + v[jn])
        r0 = eta[j] + hh * deta[j]
        r1 = deta[j] + hh * vbar * eta[j]
        det = 1.0 - hh * hh * vbar
        eta[jn] = (r0 + hh * r1) / det
        deta[jn] = (hh * vbar * r0 + r1) / det
    return eta, deta


def cn_step_loop(off, diag_h, sigma, beta, eps, mu, dt, t0, nsteps, phi):
    """Advance the forced Schrodinger equation by nsteps Crank-Nicolson steps.

    i phi_t = (H - i sigma) phi + eps cos(mu t) beta phi, with H the
    tridiagonal operator (off-diagonal value ``off``, diagonal ``diag_h``).
    The time-dependent factor is frozen at the step midpoint, keeping the
    scheme second order.  phi is updated in place; returns the final time.
    """
    n = diag_h.shape[0]
    half = 0.5j * dt
    base = diag_h - 1j * sigma
    dl = np.full(n - 1, off, dtype=np.complex128)
    t = t0
    for _ in range(nsteps):
        c = np.cos(mu * (t + 0.5 * dt))
        diag = base + (eps * c) * beta
        rhs = phi - half * (np.concatenate(([0.0], off * phi[:-1]))
                            + diag * phi
                            + np.concatenate((off * phi[1:], [0.0])))
        phi[:] = trisolve(half * dl, 1.0 + half * diag, half * dl, rhs)
        t += dt
    return t
