"""Independent reference computations used by unit and acceptance tests."""
import math


def rk4_two_body(r0, v0, mu, duration, h=0.1):
    """Fixed-step RK4 of r'' = -mu r/|r|^3; returns the final position."""
    n = int(round(duration / h))
    h = duration / n
    x, y, z = map(float, r0)
    u, v, w = map(float, v0)

    def acc(x, y, z):
        k = -mu / (x * x + y * y + z * z) ** 1.5
        return k * x, k * y, k * z

    for _ in range(n):
        a1 = acc(x, y, z)
        x2, y2, z2 = x + 0.5 * h * u, y + 0.5 * h * v, z + 0.5 * h * w
        u2, v2, w2 = u + 0.5 * h * a1[0], v + 0.5 * h * a1[1], w + 0.5 * h * a1[2]
        a2 = acc(x2, y2, z2)
        x3, y3, z3 = x + 0.5 * h * u2, y + 0.5 * h * v2, z + 0.5 * h * w2
        u3, v3, w3 = u + 0.5 * h * a2[0], v + 0.5 * h * a2[1], w + 0.5 * h * a2[2]
        a3 = acc(x3, y3, z3)
        x4, y4, z4 = x + h * u3, y + h * v3, z + h * w3
        u4, v4, w4 = u + h * a3[0], v + h * a3[1], w + h * a3[2]
        a4 = acc(x4, y4, z4)
        x += h / 6.0 * (u + 2 * u2 + 2 * u3 + u4)
        y += h / 6.0 * (v + 2 * v2 + 2 * v3 + v4)
        z += h / 6.0 * (w + 2 * w2 + 2 * w3 + w4)
        u += h / 6.0 * (a1[0] + 2 * a2[0] + 2 * a3[0] + a4[0])
        v += h / 6.0 * (a1[1] + 2 * a2[1] + 2 * a3[1] + a4[1])
        w += h / 6.0 * (a1[2] + 2 * a2[2] + 2 * a3[2] + a4[2])
    return x, y, z


def eclipse_fraction_analytic(body_radius, a):
    return math.asin(body_radius / a) / math.pi


def los_cutoff_rad(body_radius, a):
    return 2.0 * math.acos(body_radius / a)


def brute_force_windows(visible, t0, t1, step=1.0):
    """Visibility intervals from dense sampling: list of (first, last) visible samples."""
    out = []
    opened = None
    n = int(math.floor((t1 - t0) / step))
    last = None
    for k in range(n + 1):
        t = t0 + k * step
        v = visible(t)
        if v and opened is None:
            opened = t
        if not v and opened is not None:
            out.append((opened, last))
            opened = None
        last = t
    if opened is not None:
        out.append((opened, last))
    return out
