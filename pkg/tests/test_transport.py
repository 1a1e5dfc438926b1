import cmath
import math

from hypothesis import given, settings
from hypothesis import strategies as st

from irrper.connection import eigenvalues, pushforward_legendre, rank_one
from irrper.curve import critical_data
from irrper.paths import polyline
from irrper.transport import continue_fiber, continue_ode, det2, eig_numpy, loop_monodromy

wp = st.complex_numbers(max_magnitude=1.5, allow_nan=False, allow_infinity=False)


@settings(max_examples=10)
@given(st.lists(wp, min_size=2, max_size=4))
def test_ode_matches_branch_tracking(wps):
    from mpmath import fp

    cd = critical_data(2, fp)
    _, rank2 = pushforward_legendre(cd)
    poles = [complex(p) for p in rank2.points]
    if any(abs(w - p) < 0.3 for w in wps for p in poles):
        return
    if any(abs(a - b) < 1e-2 for a, b in zip(wps, wps[1:])):
        return
    path = polyline(wps, fp, rank2.points)
    ident = [[1.0, 0.0], [0.0, 1.0]]
    a, _ = continue_ode(rank2, path, ident)
    b, _ = continue_fiber(rank2, path, ident)
    scale = max(abs(complex(v)) for row in b for v in row)
    assert max(abs(complex(a[i][j]) - complex(b[i][j])) for i in range(2) for j in range(2)) <= 1e-8 * scale


def test_rank2_local_monodromy(fp):
    cd = critical_data(3 - 1j, fp)
    _, rank2 = pushforward_legendre(cd)
    q = complex(rank2.points[0])
    r = 0.4 * min(abs(q - complex(p)) for p in rank2.points[1:])
    mono, _ = loop_monodromy(rank2, q, r)
    ev = sorted(eig_numpy(mono), key=lambda z: z.real)
    # residue eigenvalues 0 and 1/2 give monodromy eigenvalues -1 and 1
    assert abs(ev[0] + 1) < 1e-8 and abs(ev[1] - 1) < 1e-8
    # det of monodromy = exp(2 pi i tr B)
    tr = sum(eigenvalues(rank2.residues[0], fp))
    assert abs(det2(mono) - cmath.exp(2j * math.pi * tr)) < 1e-8


def test_fiber_loop_agrees_with_ode(fp):
    cd = critical_data(2, fp)
    _, rank2 = pushforward_legendre(cd)
    q = complex(rank2.points[1])
    a, _ = loop_monodromy(rank2, q, 0.2, "ode")
    b, _ = loop_monodromy(rank2, q, 0.2, "fiber")
    assert max(abs(complex(a[i][j]) - complex(b[i][j])) for i in range(2) for j in range(2)) < 1e-8


def test_rank1_fiber_equals_power(fp):
    conn = rank_one([0.0, 1.0], [0.3, 0.7 + 0.1j], fp)
    path = polyline([0.5j, 2 + 0.5j], fp)
    out, _ = continue_fiber(conn, path, [[1.0]])
    want = ((2 + 0.5j) / 0.5j) ** 0.3 * ((1 + 0.5j) / (-1 + 0.5j)) ** (0.7 + 0.1j)
    got = complex(out[0])
    assert abs(got - want) < 1e-10 * abs(want) or abs(got - 1 / want) < 1e-10 * abs(want)
