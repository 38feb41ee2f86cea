"""Independent brute-force reference for the spin model, at high precision.

Everything here is deliberately built by a different route from the
package: Hamiltonian matrix elements are written out from closed-form
spin matrix elements (no operator factories, no Kronecker products), and
diagonalization uses mpmath's QR-based Hermitian solver at 40+ decimal
digits instead of the package's double-precision Jacobi iteration.

All oracle energies are in MHz (the package's 2*pi angular-frequency
scaling never enters). Fields are Gauss, angles degrees.
"""

from mpmath import mp, mpc, mpf, matrix

mp.dps = 40

GAMMA_E = mpf("-2.8")
GAMMA_N = mpf("0.0003077")
A_PAR = mpf("114")
A_PERP = mpf("81.34")
Q = mpf("-4.2")

# basis order: (m_s, m_i) with m_s in (+1/2, -1/2) outer, m_i in (+1, 0, -1)
MS = (mpf(1) / 2, mpf(-1) / 2)
MI = (1, 0, -1)
BASIS = [(ms, mi) for ms in MS for mi in MI]


def _half_spin_elements():
    half = mpf(1) / 2
    sx = {(0, 1): half, (1, 0): half}
    sy = {(0, 1): mpc(0, -1) * half, (1, 0): mpc(0, 1) * half}
    sz = {(0, 0): half, (1, 1): -half}
    return sx, sy, sz


def _one_spin_elements():
    r = 1 / mp.sqrt(2)
    ix = {(0, 1): r, (1, 0): r, (1, 2): r, (2, 1): r}
    iy = {
        (0, 1): mpc(0, -1) * r,
        (1, 0): mpc(0, 1) * r,
        (1, 2): mpc(0, -1) * r,
        (2, 1): mpc(0, 1) * r,
    }
    iz = {(0, 0): mpf(1), (2, 2): mpf(-1)}
    return ix, iy, iz


_SX, _SY, _SZ = _half_spin_elements()
_IX, _IY, _IZ = _one_spin_elements()


def _element(table, i, j):
    return table.get((i, j), mpf(0))


def field_vector(b, theta_deg, phi_deg):
    b = mpf(str(b))
    theta = mpf(str(theta_deg)) * mp.pi / 180
    phi = mpf(str(phi_deg)) * mp.pi / 180
    return (
        b * mp.sin(theta) * mp.cos(phi),
        b * mp.sin(theta) * mp.sin(phi),
        b * mp.cos(theta),
    )


def off_axis_theta_deg():
    return mp.acos(mpf(-1) / 3) * 180 / mp.pi


def hamiltonian_mhz(b, theta_deg, phi_deg=0.0):
    """6x6 P1 Hamiltonian over 2*pi (plain MHz), element by element."""
    bx, by, bz = field_vector(b, theta_deg, phi_deg)
    h = matrix(6, 6)
    for row, (ms_r, mi_r) in enumerate(BASIS):
        sr = MS.index(ms_r)
        ir = MI.index(mi_r)
        for col, (ms_c, mi_c) in enumerate(BASIS):
            sc = MS.index(ms_c)
            ic = MI.index(mi_c)
            val = mpc(0)
            if ir == ic:
                val -= GAMMA_E * (
                    bx * _element(_SX, sr, sc)
                    + by * _element(_SY, sr, sc)
                    + bz * _element(_SZ, sr, sc)
                )
            if sr == sc:
                val -= GAMMA_N * (
                    bx * _element(_IX, ir, ic)
                    + by * _element(_IY, ir, ic)
                    + bz * _element(_IZ, ir, ic)
                )
            val += A_PAR * _element(_SZ, sr, sc) * _element(_IZ, ir, ic)
            val += A_PERP * (
                _element(_SX, sr, sc) * _element(_IX, ir, ic)
                + _element(_SY, sr, sc) * _element(_IY, ir, ic)
            )
            if sr == sc and ir == ic:
                val += Q * mi_r * mi_r
            h[row, col] = val
    return h


def drive_mhz_per_gauss(polarization=(1.0, 0.0, 0.0)):
    """gamma_e S.n + gamma_n I.n in MHz per Gauss of drive amplitude."""
    nx, ny, nz = (mpf(str(c)) for c in polarization)
    norm = mp.sqrt(nx * nx + ny * ny + nz * nz)
    nx, ny, nz = nx / norm, ny / norm, nz / norm
    h = matrix(6, 6)
    for row, (ms_r, mi_r) in enumerate(BASIS):
        sr, ir = MS.index(ms_r), MI.index(mi_r)
        for col, (ms_c, mi_c) in enumerate(BASIS):
            sc, ic = MS.index(ms_c), MI.index(mi_c)
            val = mpc(0)
            if ir == ic:
                val += GAMMA_E * (
                    nx * _element(_SX, sr, sc)
                    + ny * _element(_SY, sr, sc)
                    + nz * _element(_SZ, sr, sc)
                )
            if sr == sc:
                val += GAMMA_N * (
                    nx * _element(_IX, ir, ic)
                    + ny * _element(_IY, ir, ic)
                    + nz * _element(_IZ, ir, ic)
                )
            h[row, col] = val
    return h


def eigensystem_mhz(b, theta_deg, phi_deg=0.0):
    """Eigenvalues ascending (MHz) and eigenvector columns, high precision."""
    evals, evecs = mp.eighe(hamiltonian_mhz(b, theta_deg, phi_deg))
    pairs = sorted(range(6), key=lambda k: evals[k])
    values = [evals[k] for k in pairs]
    vectors = matrix(6, 6)
    for new, old in enumerate(pairs):
        for row in range(6):
            vectors[row, new] = evecs[row, old]
    return values, vectors


def eigenvalues_mhz(b, theta_deg, phi_deg=0.0):
    return eigensystem_mhz(b, theta_deg, phi_deg)[0]


def match_column(vectors, target):
    """Index of the oracle eigenvector closest to a numpy state, plus overlap."""
    best, best_overlap = -1, mpf(0)
    for col in range(6):
        amplitude = mpc(0)
        for row in range(6):
            amplitude += mp.conj(vectors[row, col]) * mpc(complex(target[row]))
        overlap = abs(amplitude) ** 2
        if overlap > best_overlap:
            best, best_overlap = col, overlap
    return best, best_overlap


def alpha_between(vectors, col_a, col_b, polarization=(1.0, 0.0, 0.0)):
    """|<a| drive |b>| / gamma_n, using oracle eigenvectors."""
    drive = drive_mhz_per_gauss(polarization)
    total = mpc(0)
    for row in range(6):
        partial = mpc(0)
        for col in range(6):
            partial += drive[row, col] * vectors[col, col_b]
        total += mp.conj(vectors[row, col_a]) * partial
    return abs(total) / abs(GAMMA_N)
