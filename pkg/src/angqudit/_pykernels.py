"""Pure numpy versions of the compiled kernels in ``_ckernels.pyx``."""

import numpy as np


def _sinc(x):
    # np.sinc is the normalized sin(pi x)/(pi x)
    return np.sinc(np.asarray(x, dtype=float) / np.pi)


def envelope_sum(c, alpha_s, alpha_i, ls, li):
    c = np.asarray(c, dtype=np.complex128)
    L = (c.size - 1) // 2
    l = np.arange(-L, L + 1)
    ls = np.asarray(ls, dtype=np.int64)[:, None]
    li = np.asarray(li, dtype=np.int64)[:, None]
    terms = _sinc((ls - l) * alpha_s / 2) * _sinc((li + l) * alpha_i / 2)
    return terms @ c


_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)


def arc_quadrature(lo, hi, l, npts):
    """Composite 8-point Gauss-Legendre of exp(-i l phi)/(2 pi) over [lo, hi]."""
    panels = max(1, npts // 8)
    h = (hi - lo) / panels
    mids = lo + (np.arange(panels) + 0.5) * h
    phi = (mids[:, None] + 0.5 * h * _GL_X[None, :]).ravel()
    w = np.tile(_GL_W, panels)
    return complex(np.sum(w * np.exp(-1j * l * phi)) * 0.5 * h / (2 * np.pi))


def jacobi_eigh(a_in, tol=1e-14, max_sweeps=100, vectors=False):
    a = np.array(a_in, dtype=np.complex128)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    scale = np.linalg.norm(a)
    if scale == 0.0:
        return np.zeros(n), (v if vectors else None), 0
    sweep = 0
    iu = np.triu_indices(n, 1)
    while sweep < max_sweeps:
        if np.sqrt(2.0) * np.linalg.norm(a[iu]) <= tol * scale:
            break
        sweep += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                r = abs(a[p, q])
                if r <= 1e-300:
                    continue
                ph = a[p, q] / r
                tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                colp = a[:, p].copy()
                colq = a[:, q]
                a[:, p] = c * colp - s * np.conj(ph) * colq
                a[:, q] = s * colp + c * np.conj(ph) * colq
                rowp = a[p, :].copy()
                rowq = a[q, :]
                a[p, :] = c * rowp - s * ph * rowq
                a[q, :] = s * rowp + c * ph * rowq
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                if vectors:
                    vp = v[:, p].copy()
                    vq = v[:, q]
                    v[:, p] = c * vp - s * np.conj(ph) * vq
                    v[:, q] = s * vp + c * np.conj(ph) * vq
    return np.real(np.diag(a)).copy(), (v if vectors else None), sweep
