"""Independent reference implementations used to cross-check the package.

Everything here is deliberately written as a literal, loop-heavy
transcription of the quantities under test and shares no code with the
package beyond numpy/scipy primitives.
"""

import numpy as np


def objective_literal(frames, masks, aux, left, right, lam1, lam2, lam3):
    """Term-by-term objective evaluation with explicit entry loops."""
    T, m, n = frames.shape
    total = 0.0
    for t in range(T):
        product = left[t] @ right[t].T
        for i in range(m):
            for j in range(n):
                if masks[t, i, j]:
                    total += 0.5 * (frames[t, i, j] - product[i, j]) ** 2
        total += lam1 / 2 * (np.sum(left[t] ** 2) + np.sum(right[t] ** 2))
        if t >= 1:
            prev = left[t - 1] @ right[t - 1].T
            total += lam2 / 2 * np.sum((product - prev) ** 2)
        if aux is not None:
            total += lam3 / 2 * np.sum((aux[t] - product) ** 2)
    return float(total)


def partial_objective_left(candidate, t, left, right, frames, masks, aux, lam1, lam2, lam3):
    """The frame-t objective piece as a function of the left factor (masked residual)."""
    T = frames.shape[0]
    product = candidate @ right[t].T
    value = 0.5 * np.sum((masks[t] * (frames[t] - product)) ** 2)
    value += lam1 / 2 * np.sum(candidate ** 2)
    if aux is not None:
        value += lam3 / 2 * np.sum((aux[t] - product) ** 2)
    if t > 0:
        value += lam2 / 2 * np.sum((product - left[t - 1] @ right[t - 1].T) ** 2)
    if t < T - 1:
        value += lam2 / 2 * np.sum((left[t + 1] @ right[t + 1].T - product) ** 2)
    return float(value)


def surrogate_left(candidate, t, left, right, frames, masks, aux, lam1, lam2, lam3):
    """Majorized frame-t piece: masked residual replaced by the filled-in residual."""
    T = frames.shape[0]
    filled = np.where(masks[t], frames[t], left[t] @ right[t].T)
    product = candidate @ right[t].T
    value = 0.5 * np.sum((filled - product) ** 2)
    value += lam1 / 2 * np.sum(candidate ** 2)
    if aux is not None:
        value += lam3 / 2 * np.sum((aux[t] - product) ** 2)
    if t > 0:
        value += lam2 / 2 * np.sum((product - left[t - 1] @ right[t - 1].T) ** 2)
    if t < T - 1:
        value += lam2 / 2 * np.sum((left[t + 1] @ right[t + 1].T - product) ** 2)
    return float(value)


def surrogate_right(candidate, t, left, right, frames, masks, aux, lam1, lam2, lam3):
    """Mirror of surrogate_left for the right factor (fill-in uses the new left)."""
    T = frames.shape[0]
    filled = np.where(masks[t], frames[t], left[t] @ right[t].T)
    product = left[t] @ candidate.T
    value = 0.5 * np.sum((filled - product) ** 2)
    value += lam1 / 2 * np.sum(candidate ** 2)
    if aux is not None:
        value += lam3 / 2 * np.sum((aux[t] - product) ** 2)
    if t > 0:
        value += lam2 / 2 * np.sum((product - left[t - 1] @ right[t - 1].T) ** 2)
    if t < T - 1:
        value += lam2 / 2 * np.sum((left[t + 1] @ right[t + 1].T - product) ** 2)
    return float(value)


def quadratic_argmin(func, shape):
    """Minimize an exactly quadratic function by probing it on a basis.

    Reconstructs the Hessian and gradient from function values alone
    (exact for quadratics up to rounding) and solves the normal equations.
    """
    dim = int(np.prod(shape))
    zero = np.zeros(dim)
    f0 = func(zero.reshape(shape))
    f_unit = np.empty(dim)
    for i in range(dim):
        e = np.zeros(dim)
        e[i] = 1.0
        f_unit[i] = func(e.reshape(shape))
    hessian = np.empty((dim, dim))
    for i in range(dim):
        for j in range(i, dim):
            e = np.zeros(dim)
            e[i] += 1.0
            e[j] += 1.0
            f_pair = func(e.reshape(shape))
            hessian[i, j] = hessian[j, i] = f_pair - f_unit[i] - f_unit[j] + f0
    gradient = f_unit - f0 - 0.5 * np.diag(hessian)
    return np.linalg.solve(hessian, -gradient).reshape(shape)


def softimpute_als_reference(frame, mask, lam1, left0, right0, sweeps):
    """Plain alternating ridge completion of one matrix.

    Each half-step refreshes the filled-in matrix with the newest factors
    and solves the ridge normal equations directly. Returns the list of
    (left, right) iterates after each sweep.
    """
    left = left0.copy()
    right = right0.copy()
    r = left.shape[1]
    history = []
    for _ in range(sweeps):
        filled = np.where(mask, frame, left @ right.T)
        left = np.linalg.solve(right.T @ right + lam1 * np.eye(r), right.T @ filled.T).T
        filled = np.where(mask, frame, left @ right.T)
        right = np.linalg.solve(left.T @ left + lam1 * np.eye(r), left.T @ filled).T
        history.append((left.copy(), right.copy()))
    return history


def finalize_literal(left, right, frame, mask, shrinkage):
    """Step-by-step transcription of the terminal SVD / soft-threshold stage."""
    product = left @ right.T
    filled = np.where(mask, frame, product)
    _, _, vt = np.linalg.svd(product, full_matrices=False)
    v = vt[: left.shape[1]].T
    projected = filled @ v
    u, sigma, rt = np.linalg.svd(projected, full_matrices=False)
    sigma = np.maximum(sigma - shrinkage, 0.0)
    return (u * sigma) @ (rt @ v.T), int((sigma > 0).sum())


def real_sph_harm_scipy(l, m, theta, phi):
    """Real orthonormal harmonic via scipy's complex routine (geodesy sign)."""
    import scipy.special as sp

    try:
        complex_value = sp.sph_harm_y(l, abs(m), theta, phi)
    except AttributeError:
        complex_value = sp.sph_harm(abs(m), l, phi, theta)
    if m == 0:
        return float(np.real(complex_value))
    if m > 0:
        return float(np.sqrt(2.0) * (-1.0) ** m * np.real(complex_value))
    return float(np.sqrt(2.0) * (-1.0) ** m * np.imag(complex_value))
