"""Compiled inner loops shared by the Farey, free-path and billiard modules.

Everything here works on plain ints and floats so the same functions run
under numba and, through the thin wrappers elsewhere, from Python.
"""

import math

import numpy as np
from numba import njit

NO_HIT = -1


@njit(cache=True)
def bracket(x, Q):
    """Consecutive a/q <= x < a2/q2 in F_Q by batched Stern-Brocot descent."""
    a0, q0, a1, q1 = 0, 1, 1, 1
    while q0 + q1 <= Q:
        am = a0 + a1
        qm = q0 + q1
        if x * qm >= am:
            kmax = (Q - q0) // q1
            den = a1 - x * q1
            if den <= 0.0:
                k = kmax
            else:
                kf = math.floor((x * q0 - a0) / den)
                k = kmax if kf >= kmax else int(kf)
            if k < 1:
                k = 1
            while k > 1 and x * (q0 + k * q1) < a0 + k * a1:
                k -= 1
            a0 += k * a1
            q0 += k * q1
        else:
            kmax = (Q - q1) // q0
            den = x * q0 - a0
            if den <= 0.0:
                k = kmax
            else:
                kf = math.ceil((a1 - x * q1) / den) - 1.0
                k = kmax if kf >= kmax else int(kf)
            if k < 1:
                k = 1
            while k > 1 and x * (q1 + k * q0) <= a1 + k * a0:
                k -= 1
            a1 += k * a0
            q1 += k * q0
    return a0, q0, a1, q1


@njit(cache=True)
def is_hit(q, a, x, eps):
    # The single predicate every engine uses, so oracles compare bit-for-bit.
    return abs(q * x - a) <= eps


@njit(cache=True)
def is_sink(q, a, ell, sign):
    return (q - sign * a) % ell == 0


@njit(cache=True)
def _scan(x, eps, ell, sign, q_from, q_max):
    for q in range(q_from, q_max + 1):
        n = round(q * x)
        if abs(q * x - n) <= eps and (q - sign * n) % ell != 0:
            return q, int(n)
    return NO_HIT, NO_HIT


@njit(cache=True)
def left_chain_index(a, q, a2, q2, x, eps, j_cap):
    """Smallest j >= 0 with q_j x >= a_j - eps on the chain (ja+a2)/(jq+q2).

    Returns -1 when the index exceeds ``j_cap`` (or x sits on the sink).
    """
    den = x * q - a
    if den <= 0.0:
        return -1
    r = (a2 - eps - x * q2) / den
    if r > j_cap:
        return -1
    j = int(math.ceil(r)) if r > 0.0 else 0
    while j > 0 and is_hit(j * q + q2 - q, j * a + a2 - a, x, eps):
        j -= 1
    while not is_hit(j * q + q2, j * a + a2, x, eps):
        j += 1
        if j > j_cap:
            return -1
    return j


@njit(cache=True)
def right_chain_index(a, q, a2, q2, x, eps, j_cap):
    """Smallest j >= 0 with q'_j x <= a'_j + eps on the chain (ja2+a)/(jq2+q)."""
    den = a2 - x * q2
    if den <= 0.0:
        return -1
    r = (x * q - a - eps) / den
    if r > j_cap:
        return -1
    j = int(math.ceil(r)) if r > 0.0 else 0
    while j > 0 and is_hit(j * q2 + q - q2, j * a2 + a - a2, x, eps):
        j -= 1
    while not is_hit(j * q2 + q, j * a2 + a, x, eps):
        j += 1
        if j > j_cap:
            return -1
    return j


@njit(cache=True)
def horizontal_hit(x, eps, ell, sign, q_max):
    """First scatterer column hit by slope x in [0, 1] among (q, n), q - sign*n != 0 mod ell.

    Vertical segments of half-length eps; returns (q, n) or (-1, -1) when
    nothing is hit with q <= q_max.
    """
    if x >= 1.0:
        if (1 - sign) % ell != 0 and abs(x - 1.0) <= eps:
            return 1, 1
        return _scan(x, eps, ell, sign, 1, min(q_max, 4))
    Q = int(math.floor(1.0 / eps))
    a, q, a2, q2 = bracket(x, Q)
    lsink = is_sink(q, a, ell, sign)
    rsink = is_sink(q2, a2, ell, sign)
    if not lsink and not rsink:
        lh = is_hit(q, a, x, eps)
        rh = is_hit(q2, a2, x, eps)
        if lh and (not rh or q < q2):
            qe, ne = q, a
        elif rh:
            qe, ne = q2, a2
        else:
            # only reachable on a rounding boundary between t0 and u0
            return _scan(x, eps, ell, sign, 1, q_max)
    elif lsink:
        j = left_chain_index(a, q, a2, q2, x, eps, (q_max - q2) // q + 1)
        if j < 0:
            return NO_HIT, NO_HIT
        qe, ne = j * q + q2, j * a + a2
    else:
        j = right_chain_index(a, q, a2, q2, x, eps, (q_max - q) // q2 + 1)
        if j < 0:
            return NO_HIT, NO_HIT
        qe, ne = j * q2 + q, j * a2 + a
    if qe > q_max:
        return NO_HIT, NO_HIT
    return qe, ne


@njit(cache=True)
def disc_hit(omega, eps, ell, path_max):
    """Free path from the origin among discs at (m, n), m != n mod ell.

    Reduces the direction to slope in [0, 1] with the matching congruence
    class, then solves the equivalent vertical-segment problem exactly.
    Returns (tau, m, n); tau is inf when nothing is hit within path_max.
    """
    c = math.cos(omega)
    s = math.sin(omega)
    sx = 1 if c >= 0.0 else -1
    sy = 1 if s >= 0.0 else -1
    X = abs(c)
    Y = abs(s)
    swap = Y > X
    if swap:
        major, minor = Y, X
    else:
        major, minor = X, Y
    slope = minor / major
    q_max = int(path_max * major) + 2
    M, N = horizontal_hit(slope, eps / major, ell, sx * sy, q_max)
    if M < 0:
        return math.inf, 0, 0
    p = M * major + N * minor
    d = abs(M * minor - N * major)
    tau = p - math.sqrt(max(eps * eps - d * d, 0.0))
    if tau > path_max:
        return math.inf, 0, 0
    if swap:
        return tau, sx * N, sy * M
    return tau, sx * M, sy * N


SQRT3 = math.sqrt(3.0)
SECTOR = math.pi / 3.0


@njit(cache=True)
def hex_hit(omega, eps, path_max):
    """Free path from a hexagon centre among honeycomb vertices m*(1,0) + n*(1/2, sqrt3/2)."""
    k = int(math.floor(omega / SECTOR))
    w = omega - k * SECTOR
    if w >= SECTOR:
        w -= SECTOR
        k += 1
    flip = w > SECTOR / 2.0
    if flip:
        w = SECTOR - w
    sa = math.sin(w)
    sb = math.sin(SECTOR - w)
    # sb >= sqrt(3)/2 on [0, pi/6]; the sextant problem is the ell = 3 lattice
    q_max = int(path_max * sb / (SQRT3 / 2.0)) + 2
    M, N = horizontal_hit(sa / sb, eps / sb, 3, 1, q_max)
    if M < 0:
        return math.inf, 0, 0
    p = M * math.cos(w) + N * math.cos(SECTOR - w)
    d = abs(M * sa - N * sb)
    tau = p - math.sqrt(max(eps * eps - d * d, 0.0))
    if tau > path_max:
        return math.inf, 0, 0
    if flip:
        M, N = N, M
    for _ in range(k % 6):
        M, N = -N, M + N
    return tau, M, N


@njit(cache=True, nogil=True)
def sweep_disc(omegas, eps, ell, path_max, out):
    for i in range(omegas.shape[0]):
        out[i] = eps * disc_hit(omegas[i], eps, ell, path_max)[0]


@njit(cache=True, nogil=True)
def sweep_hex(omegas, eps, path_max, out):
    for i in range(omegas.shape[0]):
        out[i] = eps * hex_hit(omegas[i], eps, path_max)[0]


@njit(cache=True, nogil=True)
def sweep_square(omegas, eps, path_max, out):
    # unit square from its centre == ell = 2 lattice rotated by 45 deg, scaled sqrt(2)
    r2 = math.sqrt(2.0)
    for i in range(omegas.shape[0]):
        tau = disc_hit(omegas[i] - math.pi / 4.0, eps * r2, 2, path_max * r2)[0]
        out[i] = eps * tau / r2


@njit(cache=True, nogil=True)
def sweep_horizontal(slopes, eps, ell, sign, q_max, out):
    for i in range(slopes.shape[0]):
        q = horizontal_hit(slopes[i], eps, ell, sign, q_max)[0]
        out[i] = math.inf if q < 0 else float(q)


@njit(cache=True)
def farey_sequence(Q):
    """Numerators and denominators of F_Q (0/1 .. 1/1) by the next-term recurrence."""
    # exact length is 2 + sum_{2<=q<=Q} phi(q) <= Q^2/2 + 3
    cap = Q * Q // 2 + 3
    nums = np.empty(cap, dtype=np.int64)
    dens = np.empty(cap, dtype=np.int64)
    a, b, c, d = 0, 1, 1, Q
    nums[0] = a
    dens[0] = b
    i = 1
    while c <= Q:
        nums[i] = c
        dens[i] = d
        i += 1
        k = (Q + b) // d
        a, b, c, d = c, d, k * c - a, k * d - b
    return nums[:i].copy(), dens[:i].copy()


@njit(cache=True)
def polygon_billiard(vx, vy, nx, ny, h, base, omega, eps, path_max, max_bounces):
    """Specular billiard in a regular polygon with corner pockets, from the origin.

    The direction is tracked as a group element (sign, index): heading
    sign*omega + index*2pi/N, so reflections are exact table lookups.
    Returns (tau, pocket index, bounces); tau is inf past path_max.
    """
    nv = vx.shape[0]
    step = 2.0 * math.pi / nv
    dcos = np.empty((2, nv))
    dsin = np.empty((2, nv))
    for sgn in range(2):
        for m in range(nv):
            th = (omega if sgn == 0 else -omega) + m * step
            dcos[sgn, m] = math.cos(th)
            dsin[sgn, m] = math.sin(th)
    px, py = 0.0, 0.0
    sgn, m = 0, 0
    travelled = 0.0
    carry = 0.0  # compensated sum: tens of thousands of segments otherwise drift ~1e-9
    bounces = 0
    while travelled <= path_max:
        dx = dcos[sgn, m]
        dy = dsin[sgn, m]
        t_exit = math.inf
        edge = -1
        for j in range(nv):
            dn = nx[j] * dx + ny[j] * dy
            if dn > 0.0:
                t = (h - (nx[j] * px + ny[j] * py)) / dn
                if t < t_exit:
                    t_exit = t
                    edge = j
        best = math.inf
        pocket = -1
        for i in range(nv):
            rx = vx[i] - px
            ry = vy[i] - py
            s = rx * dx + ry * dy
            d2 = rx * rx + ry * ry - s * s
            if d2 <= eps * eps:
                s_in = s - math.sqrt(max(eps * eps - d2, 0.0))
                if s_in >= 0.0 and s_in <= t_exit and s_in < best:
                    best = s_in
                    pocket = i
        if pocket >= 0:
            tau = travelled + (best - carry)
            if tau > path_max:
                return math.inf, -1, bounces
            return tau, pocket, bounces
        px += t_exit * dx
        py += t_exit * dy
        y = t_exit - carry
        t = travelled + y
        carry = (t - travelled) - y
        travelled = t
        # heading sigma*w + m*step reflected in a wall with normal angle phi_j
        m = (base + 2 * edge - m) % nv
        sgn = 1 - sgn
        bounces += 1
        if bounces > max_bounces:
            return math.nan, -1, bounces
    return math.inf, -1, bounces


@njit(cache=True)
def brackets_by_scan(xs_sorted, Q):
    """Bracket every (ascending) x by walking F_Q term by term; O(Q^2) oracle."""
    n = xs_sorted.shape[0]
    out = np.empty((n, 4), dtype=np.int64)
    a, b, c, d = 0, 1, 1, Q
    i = 0
    while i < n:
        # advance until x < c/d
        x = xs_sorted[i]
        if x * d < c:
            out[i, 0] = a
            out[i, 1] = b
            out[i, 2] = c
            out[i, 3] = d
            i += 1
            continue
        k = (Q + b) // d
        a, b, c, d = c, d, k * c - a, k * d - b
    return out
