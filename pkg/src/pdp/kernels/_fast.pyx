# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels (see _ref.py for the reference)."""
import numpy as np

cimport numpy as cnp
from libc.math cimport cos

cnp.import_array()


def trisolve(dl, d, du, b):
    """Thomas algorithm for a (complex) tridiagonal system."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] dl_ = np.ascontiguousarray(dl, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] d_ = np.ascontiguousarray(d, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] du_ = np.ascontiguousarray(du, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] b_ = np.ascontiguousarray(b, dtype=np.complex128)
    cdef Py_ssize_t n = d_.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] c = np.empty(n - 1, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] x = np.empty(n, dtype=np.complex128)
    cdef double complex piv, m
    cdef Py_ssize_t i

    piv = d_[0]
    if piv == 0:
        raise np.linalg.LinAlgError("singular tridiagonal system")
    c[0] = du_[0] / piv
    x[0] = b_[0] / piv
    for i in range(1, n):
        piv = d_[i] - dl_[i - 1] * c[i - 1]
        if piv == 0:
            raise np.linalg.LinAlgError("singular tridiagonal system")
        if i < n - 1:
            c[i] = du_[i] / piv
        x[i] = (b_[i] - dl_[i - 1] * x[i - 1]) / piv
    for i in range(n - 2, -1, -1):
        x[i] = x[i] - c[i] * x[i + 1]
    if np.iscomplexobj(d) or np.iscomplexobj(b) or np.iscomplexobj(dl) or np.iscomplexobj(du):
        return x
    return np.real(x)


def sturm_count_below(d, e, double sigma):
    """Eigenvalue count of a symmetric tridiagonal matrix below sigma."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] d_ = np.ascontiguousarray(d, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] e_ = np.ascontiguousarray(e, dtype=np.float64)
    cdef Py_ssize_t n = d_.shape[0]
    cdef int count = 0
    cdef double q = d_[0] - sigma
    cdef double tiny = np.finfo(np.float64).tiny
    cdef Py_ssize_t i
    if q < 0.0:
        count += 1
    for i in range(1, n):
        if q == 0.0:
            q = tiny
        q = (d_[i] - sigma) - e_[i - 1] * e_[i - 1] / q
        if q < 0.0:
            count += 1
    return count


def march_half_bound(v, double h, bint from_right):
    """Trapezoidal one-step march of eta'' = V eta; returns (eta, deta)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] v_ = np.ascontiguousarray(v, dtype=np.float64)
    cdef Py_ssize_t n = v_.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] eta = np.empty(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] deta = np.empty(n)
    cdef Py_ssize_t j, jn, start
    cdef int step
    cdef double hh, r0, r1, det, vbar

    if from_right:
        start = n - 1
        step = -1
    else:
        start = 0
        step = 1
    eta[start] = 1.0
    deta[start] = 0.0
    hh = 0.5 * h * step
    j = start
    while j != start + step * (n - 1):
        jn = j + step
        vbar = 0.5 * (v_[j] + v_[jn])
        r0 = eta[j] + hh * deta[j]
        r1 = deta[j] + hh * vbar * eta[j]
        det = 1.0 - hh * hh * vbar
        eta[jn] = (r0 + hh * r1) / det
        deta[jn] = (hh * vbar * r0 + r1) / det
        j = jn
    return eta, deta


def cn_step_loop(double off, diag_h, sigma, beta, double eps, double mu,
                 double dt, double t0, Py_ssize_t nsteps, phi):
    """Crank-Nicolson time stepping with midpoint-frozen forcing, in place."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dh = np.ascontiguousarray(diag_h, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] sg = np.ascontiguousarray(sigma, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] bt = np.ascontiguousarray(beta, dtype=np.float64)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] ph = np.asarray(phi, dtype=np.complex128)
    cdef Py_ssize_t n = dh.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] c = np.empty(n - 1, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] rhs = np.empty(n, dtype=np.complex128)
    cdef double complex half = 0.5j * dt
    cdef double complex lo = half * off
    cdef double complex piv, aj
    cdef double t = t0, cmid
    cdef Py_ssize_t i, s

    for s in range(nsteps):
        cmid = cos(mu * (t + 0.5 * dt))
        # rhs = (I - half*A) phi, A tridiag(off, diag, off)
        for i in range(n):
            aj = dh[i] - 1j * sg[i] + eps * cmid * bt[i]
            rhs[i] = ph[i] - half * aj * ph[i]
        for i in range(1, n):
            rhs[i] -= lo * ph[i - 1]
        for i in range(n - 1):
            rhs[i] -= lo * ph[i + 1]
        # in-place Thomas solve of (I + half*A) ph = rhs
        aj = dh[0] - 1j * sg[0] + eps * cmid * bt[0]
        piv = 1.0 + half * aj
        c[0] = lo / piv
        ph[0] = rhs[0] / piv
        for i in range(1, n):
            aj = dh[i] - 1j * sg[i] + eps * cmid * bt[i]
            piv = (1.0 + half * aj) - lo * c[i - 1]
            if i < n - 1:
                c[i] = lo / piv
            ph[i] = (rhs[i] - lo * ph[i - 1]) / piv
        for i in range(n - 2, -1, -1):
            ph[i] = ph[i] - c[i] * ph[i + 1]
        t += dt
    if ph is not phi:
        np.asarray(phi)[:] = ph
    return t
