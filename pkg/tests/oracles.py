"""Reference computations that do not share code paths with the package."""

import numpy as np

SY = np.array([[0, -1j], [1j, 0]])


def concurrence_eig(rho):
    """Wootters concurrence from the eigenvalues of rho (sy x sy) rho* (sy x sy)."""
    yy = np.kron(SY, SY)
    rt = yy @ rho.conj() @ yy
    ev = np.sort(np.sqrt(np.abs(np.linalg.eigvals(rho @ rt))))[::-1]
    return max(0.0, ev[0] - ev[1] - ev[2] - ev[3])


def ckw_tangle(psi):
    """Three-tangle of a normalized pure state as 4 det(rho_A) - C_AB^2 - C_AC^2."""
    t = np.asarray(psi).reshape(2, 2, 2)
    rho = np.einsum("abc,def->abcdef", t, t.conj())
    rho_a = np.einsum("abcdbc->ad", rho)
    rho_ab = np.einsum("abcdec->abde", rho).reshape(4, 4)
    rho_ac = np.einsum("abcdbf->acdf", rho).reshape(4, 4)
    return 4 * np.linalg.det(rho_a).real - concurrence_eig(rho_ab) ** 2 - concurrence_eig(rho_ac) ** 2


def ket(bits):
    v = np.zeros(2 ** len(bits), complex)
    v[int(bits, 2)] = 1
    return v
