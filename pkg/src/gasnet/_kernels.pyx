# cython: language_level=3, boundscheck=False, cdivision=True
"""Compiled wave-curve kernels; mirrors gasnet._kernels_py one to one."""

from libc.math cimport sqrt, pow

BACKEND = "cython"


cpdef double iso_sound_speed(double rho, double kappa, double gamma):
    return sqrt(kappa * gamma * pow(rho, gamma - 1.0))


cpdef double theta2(double rho_star, double rho_bar, double kappa, double gamma):
    cdef double beta, a, dp
    if rho_star <= rho_bar:
        beta = 0.5 * (gamma - 1.0)
        a = 2.0 * sqrt(kappa * gamma) / (gamma - 1.0)
        return a * rho_star * (pow(rho_star, beta) - pow(rho_bar, beta))
    dp = kappa * (pow(rho_star, gamma) - pow(rho_bar, gamma))
    return sqrt((rho_star / rho_bar) * (rho_star - rho_bar) * dp)


cpdef double dtheta2(double rho_star, double rho_bar, double kappa, double gamma):
    cdef double beta, a, dp, g, dg
    if rho_star <= rho_bar:
        beta = 0.5 * (gamma - 1.0)
        a = 2.0 * sqrt(kappa * gamma) / (gamma - 1.0)
        return a * ((1.0 + beta) * pow(rho_star, beta) - pow(rho_bar, beta))
    dp = kappa * (pow(rho_star, gamma) - pow(rho_bar, gamma))
    g = (rho_star / rho_bar) * (rho_star - rho_bar) * dp
    dg = ((2.0 * rho_star - rho_bar) * dp
          + rho_star * (rho_star - rho_bar) * kappa * gamma * pow(rho_star, gamma - 1.0)) / rho_bar
    return 0.5 * dg / sqrt(g)


cpdef double theta3(double rho_star, double rho_bar, double kappa, double gamma):
    cdef double delta, b, dp
    if rho_star <= rho_bar:
        delta = 0.5 * (gamma + 1.0)
        b = 2.0 * sqrt(kappa * gamma) / (gamma + 1.0)
        return b * (pow(rho_star, delta) - pow(rho_bar, delta))
    dp = kappa * (pow(rho_star, gamma) - pow(rho_bar, gamma))
    return sqrt((rho_star - rho_bar) * dp)


cpdef double dtheta3(double rho_star, double rho_bar, double kappa, double gamma):
    cdef double dp, g, dg
    if rho_star <= rho_bar:
        return sqrt(kappa * gamma) * pow(rho_star, 0.5 * (gamma - 1.0))
    dp = kappa * (pow(rho_star, gamma) - pow(rho_bar, gamma))
    g = (rho_star - rho_bar) * dp
    dg = dp + (rho_star - rho_bar) * kappa * gamma * pow(rho_star, gamma - 1.0)
    return 0.5 * dg / sqrt(g)


cpdef double psi(double p_star, double p_k, double rho_k, double gamma):
    cdef double c_k, e, mu2
    if p_star <= p_k:
        c_k = sqrt(gamma * p_k / rho_k)
        e = 0.5 * (gamma - 1.0) / gamma
        return 2.0 * c_k / (gamma - 1.0) * (pow(p_star / p_k, e) - 1.0)
    mu2 = (gamma - 1.0) / (gamma + 1.0)
    return (p_star - p_k) * sqrt((1.0 - mu2) / (rho_k * (p_star + mu2 * p_k)))


cpdef double dpsi(double p_star, double p_k, double rho_k, double gamma):
    cdef double c_k, e, mu2, root
    if p_star <= p_k:
        c_k = sqrt(gamma * p_k / rho_k)
        e = 0.5 * (gamma - 1.0) / gamma
        return c_k / (gamma * p_star) * pow(p_star / p_k, e)
    mu2 = (gamma - 1.0) / (gamma + 1.0)
    root = sqrt((1.0 - mu2) / (rho_k * (p_star + mu2 * p_k)))
    return root * (1.0 - 0.5 * (p_star - p_k) / (p_star + mu2 * p_k))


cpdef double phi(double p_star, double p_k, double rho_k, double gamma):
    cdef double mu2
    if p_star <= p_k:
        return rho_k * pow(p_star / p_k, 1.0 / gamma)
    mu2 = (gamma - 1.0) / (gamma + 1.0)
    return rho_k * (p_star + mu2 * p_k) / (mu2 * p_star + p_k)


cpdef double dphi(double p_star, double p_k, double rho_k, double gamma):
    cdef double mu2
    if p_star <= p_k:
        return rho_k * pow(p_star / p_k, 1.0 / gamma) / (gamma * p_star)
    mu2 = (gamma - 1.0) / (gamma + 1.0)
    return rho_k * p_k * (1.0 - mu2 * mu2) / ((mu2 * p_star + p_k) * (mu2 * p_star + p_k))


cdef inline double _f_m1(double p, double p_l, double rho_l, double p_r,
                         double rho_r, double du, double gamma):
    return psi(p, p_l, rho_l, gamma) + psi(p, p_r, rho_r, gamma) + du


def solve_p_star_m1(double rho_l, double u_l, double p_l, double rho_r,
                    double u_r, double p_r, double gamma, double tol, int max_iter):
    cdef double c_l = sqrt(gamma * p_l / rho_l)
    cdef double c_r = sqrt(gamma * p_r / rho_r)
    cdef double du = u_r - u_l
    cdef double e, guess, lo, hi, x, fx, d, x_new
    cdef int it, grow
    cdef bint below
    if 2.0 * (c_l + c_r) / (gamma - 1.0) <= du:
        return 0.0, -2
    e = 0.5 * (gamma - 1.0) / gamma
    guess = pow((c_l + c_r - 0.5 * (gamma - 1.0) * du)
                / (c_l / pow(p_l, e) + c_r / pow(p_r, e)), 1.0 / e)
    lo = 1e-14 * min(p_l, p_r)
    hi = 2.0 * max(max(p_l, p_r), guess)
    grow = 0
    while _f_m1(hi, p_l, rho_l, p_r, rho_r, du, gamma) < 0.0:
        hi *= 2.0
        grow += 1
        if grow > 200:
            return 0.0, -1
    x = min(max(guess, lo * 2.0), hi * 0.5)
    for it in range(1, max_iter + 1):
        fx = _f_m1(x, p_l, rho_l, p_r, rho_r, du, gamma)
        if abs(fx) <= tol:
            return x, it
        if fx < 0.0:
            lo = x
        else:
            hi = x
        d = dpsi(x, p_l, rho_l, gamma) + dpsi(x, p_r, rho_r, gamma)
        below = d != 0.0
        if below:
            x_new = x - fx / d
            below = lo < x_new < hi
        if not below:
            x_new = 0.5 * (lo + hi)
        if x_new == x:
            return x, it
        x = x_new
    return x, -1


cdef inline double _f_m2(double rho, double rho_l, double rho_r, double dv,
                         double kappa, double gamma):
    return dv * rho - theta2(rho, rho_l, kappa, gamma) - theta2(rho, rho_r, kappa, gamma)


def solve_rho_star_m2(double rho_l, double u_l, double rho_r, double u_r,
                      double kappa, double gamma, double tol, int max_iter):
    cdef double c_l = iso_sound_speed(rho_l, kappa, gamma)
    cdef double c_r = iso_sound_speed(rho_r, kappa, gamma)
    cdef double dv = u_l - u_r
    cdef double lo, hi, x, fx, d, x_new
    cdef int it, grow
    cdef bint ok
    if 2.0 * (c_l + c_r) / (gamma - 1.0) <= u_r - u_l:
        return 0.0, -2
    lo = 1e-14 * min(rho_l, rho_r)
    hi = 2.0 * max(rho_l, rho_r)
    grow = 0
    while _f_m2(hi, rho_l, rho_r, dv, kappa, gamma) > 0.0:
        hi *= 2.0
        grow += 1
        if grow > 200:
            return 0.0, -1
    x = 0.5 * (rho_l + rho_r)
    if not (lo < x < hi):
        x = 0.5 * (lo + hi)
    for it in range(1, max_iter + 1):
        fx = _f_m2(x, rho_l, rho_r, dv, kappa, gamma)
        if abs(fx) <= tol:
            return x, it
        if fx > 0.0:
            lo = x
        else:
            hi = x
        d = dv - dtheta2(x, rho_l, kappa, gamma) - dtheta2(x, rho_r, kappa, gamma)
        ok = d != 0.0
        if ok:
            x_new = x - fx / d
            ok = lo < x_new < hi
        if not ok:
            x_new = 0.5 * (lo + hi)
        if x_new == x:
            return x, it
        x = x_new
    return x, -1


cdef inline double _f_m3(double rho, double rho_l, double rho_r, double dq,
                         double kappa, double gamma):
    return dq - theta3(rho, rho_l, kappa, gamma) - theta3(rho, rho_r, kappa, gamma)


def solve_rho_star_m3(double rho_l, double q_l, double rho_r, double q_r,
                      double kappa, double gamma, double tol, int max_iter):
    cdef double c_l = iso_sound_speed(rho_l, kappa, gamma)
    cdef double c_r = iso_sound_speed(rho_r, kappa, gamma)
    cdef double dq = q_l - q_r
    cdef double lo, hi, x, fx, d, x_new
    cdef int it, grow
    cdef bint ok
    if dq + 2.0 * (c_l * rho_l + c_r * rho_r) / (gamma + 1.0) <= 0.0:
        return 0.0, -2
    lo = 1e-14 * min(rho_l, rho_r)
    hi = 2.0 * max(rho_l, rho_r)
    grow = 0
    while _f_m3(hi, rho_l, rho_r, dq, kappa, gamma) > 0.0:
        hi *= 2.0
        grow += 1
        if grow > 200:
            return 0.0, -1
    x = 0.5 * (rho_l + rho_r)
    if not (lo < x < hi):
        x = 0.5 * (lo + hi)
    for it in range(1, max_iter + 1):
        fx = _f_m3(x, rho_l, rho_r, dq, kappa, gamma)
        if abs(fx) <= tol:
            return x, it
        if fx > 0.0:
            lo = x
        else:
            hi = x
        d = -dtheta3(x, rho_l, kappa, gamma) - dtheta3(x, rho_r, kappa, gamma)
        ok = d != 0.0
        if ok:
            x_new = x - fx / d
            ok = lo < x_new < hi
        if not ok:
            x_new = 0.5 * (lo + hi)
        if x_new == x:
            return x, it
        x = x_new
    return x, -1
