"""Cusp cross-sections, Dehn-filling homology, and the behaviour of the
polynomial invariants under filling.

The cross-section of a cusp is the triangulated surface whose triangles
are the tetrahedron corners at that ideal vertex and whose sides are the
face corners between them.  Its first homology is computed with the
same dual-spine machinery as the manifold's, and mapping a cross-section
cycle to the manifold means crossing, for each side, the manifold face
containing it, with the coorientation sign.
"""

import math

from .census_io import CensusError
from .homology import AbelianQuotient, H1Data, smith_normal_form
from .laurent import LaurentPoly, exact_div, sign_twist, specialize


class CuspData:
    """One ideal vertex: its link surface, a homology basis of the link,
    and the peripheral images in the manifold's homology.

    basis holds two side-space cycle vectors (a, b) spanning the free
    first homology of the link torus; the basis is the deterministic
    one induced by Smith normal form.  Any basis of a torus has
    intersection number +-1; the sign is an internal convention (slope
    coordinates are only meaningful relative to this artifact's basis).
    """

    __slots__ = ("index", "corners", "triangles", "sides", "side_faces",
                 "n_manifold_faces", "link_h1", "basis", "periph_face",
                 "periph_kernel", "periph_class")

    def __init__(self, index, corners, triangles, sides, side_faces,
                 n_manifold_faces, link_h1, basis):
        self.index = index
        self.corners = corners
        self.triangles = triangles
        self.sides = sides
        self.side_faces = side_faces
        self.n_manifold_faces = n_manifold_faces
        self.link_h1 = link_h1
        self.basis = basis
        self.periph_face = None
        self.periph_kernel = None
        self.periph_class = None


def _side_partner(table, key):
    t, v, fs = key
    t2, p = table.gluings[t][fs]
    return (t2, p[v], p[fs])


def _vertex_classes(table):
    """Ideal-vertex classes of tetrahedron corners, sorted for a
    deterministic cusp order."""
    seen = set()
    classes = []
    for t in range(table.n_tet):
        for v in range(4):
            if (t, v) in seen:
                continue
            comp = []
            queue = [(t, v)]
            seen.add((t, v))
            while queue:
                ct, cv = queue.pop(0)
                comp.append((ct, cv))
                for fs in range(4):
                    if fs == cv:
                        continue
                    t2, p = table.gluings[ct][fs]
                    c2 = (t2, p[cv])
                    if c2 not in seen:
                        seen.add(c2)
                        queue.append(c2)
            classes.append(sorted(comp))
    classes.sort()
    return classes


def cross_section_to_faces(cusp, z):
    """Manifold face vector of a link cycle: crossing a side in its
    reference direction crosses the face containing it, from below when
    the side's home triangle sits on the below side."""
    vec = [0] * cusp.n_manifold_faces
    for si, zval in enumerate(z):
        if zval:
            fidx, sgn = cusp.side_faces[si]
            vec[fidx] += zval * sgn
    return vec


def vertex_links(ts, coor, cycles, h1):
    """One CuspData per ideal vertex.  Asserts each link is a torus."""
    table = ts.table
    cusps = []
    for index, corners in enumerate(_vertex_classes(table)):
        tri_index = {c: i for i, c in enumerate(corners)}
        side_keys = set()
        for (t, v) in corners:
            for fs in range(4):
                if fs == v:
                    continue
                key = (t, v, fs)
                side_keys.add(min(key, _side_partner(table, key)))
        sides = sorted(side_keys)
        side_index = {k: i for i, k in enumerate(sides)}
        # dual graph of the link: reference direction of a side runs from
        # its canonical-key triangle to the partner triangle
        d1 = [[0] * len(sides) for _ in corners]
        for si, key in enumerate(sides):
            t, v, fs = key
            t2, v2, _ = _side_partner(table, key)
            d1[tri_index[(t2, v2)]][si] += 1
            d1[tri_index[(t, v)]][si] -= 1
        # link vertices are edge ends; their 2-cell boundaries (fans) come
        # from the manifold edge's corner cycle restricted to this end
        linkverts = []
        d2_cols = []
        for cyc in cycles:
            for end in (0, 1):
                v0 = cyc.dirs[0][end]
                if (cyc.corners[0][0], v0) not in tri_index:
                    continue
                col = [0] * len(sides)
                for i in range(len(cyc.corners)):
                    t_i = cyc.corners[i][0]
                    v_i = cyc.dirs[i][end]
                    key = (t_i, v_i, cyc.exits[i])
                    canon = min(key, _side_partner(table, key))
                    col[side_index[canon]] += 1 if canon == key else -1
                linkverts.append((cyc.edge, end))
                d2_cols.append(col)
        d2 = [[d2_cols[j][si] for j in range(len(d2_cols))]
              for si in range(len(sides))]
        assert len(linkverts) - len(sides) + len(corners) == 0, \
            "cusp cross-section has nonzero Euler characteristic"
        link_h1 = H1Data(len(corners), len(sides), len(linkverts), d1, d2)
        if link_h1.rank != 2 or link_h1.torsion:
            raise CensusError("cusp %d cross-section is not a torus" % index)
        basis = tuple(
            link_h1.w_position_representative(pos)
            for pos in link_h1.quot.free_positions)
        side_faces = []
        for (t, v, fs) in sides:
            fidx = table.face_index[(t, fs)]
            side_faces.append(
                (fidx, 1 if coor.below[fidx] == (t, fs) else -1))
        cusp = CuspData(index, corners, list(corners), sides, side_faces,
                        len(table.faces), link_h1, basis)
        pf = tuple(cross_section_to_faces(cusp, z) for z in basis)
        cusp.periph_face = pf
        cusp.periph_kernel = tuple(h1.cycle_kernel_coords(v) for v in pf)
        cusp.periph_class = tuple(h1.cycle_class_full(v) for v in pf)
        cusps.append(cusp)
    assert sum(len(c.corners) for c in cusps) == 4 * table.n_tet
    return cusps


class FillingSpec:
    """Slopes per filled cusp index, in that cusp's (a, b) basis."""

    __slots__ = ("slopes",)

    def __init__(self, slopes):
        clean = {}
        for j, (x, y) in sorted(slopes.items()):
            x, y = int(x), int(y)
            if math.gcd(x, y) != 1:
                raise CensusError(
                    "slope %d/%d on cusp %d is not primitive" % (x, y, j))
            clean[j] = (x, y)
        self.slopes = clean

    def filled_indices(self):
        return sorted(self.slopes)


def parse_slopes(text):
    """Parse a slope list like "c0:1/2,c2:-3/1" into a FillingSpec."""
    slopes = {}
    text = text.strip()
    if text:
        for chunk in text.split(","):
            try:
                cusp, frac = chunk.strip().split(":")
                if not cusp.startswith("c"):
                    raise ValueError(chunk)
                x, y = frac.split("/")
                j = int(cusp[1:])
                pair = (int(x), int(y))
            except ValueError:
                raise CensusError("malformed slope %r (want cJ:x/y)" % chunk)
            if j in slopes:
                raise CensusError("cusp %d filled twice" % j)
            slopes[j] = pair
    return FillingSpec(slopes)


def _egcd(a, b):
    """(g, u, v) with u*a + v*b = g = gcd(a, b)."""
    old_r, r = a, b
    old_u, u = 1, 0
    old_v, v = 0, 1
    while r:
        qt = old_r // r
        old_r, r = r, old_r - qt * r
        old_u, u = u, old_u - qt * u
        old_v, v = v, old_v - qt * v
    if old_r < 0:
        old_r, old_u, old_v = -old_r, -old_u, -old_v
    return old_r, old_u, old_v


def _omega_kernel_vec(h1, beta, v):
    """Edge-orientation value (0/1) of the H_1 class with kernel-basis
    coordinates v."""
    rho = h1.snf1.rank
    V = h1.snf1.V
    tot = 0
    for f in range(h1.n_faces):
        zf = sum(V[f][rho + i] * v[i] for i in range(h1.q))
        tot += beta[f] * zf
    return tot % 2


class FilledHomology:
    """Homology of the Dehn filling N, the induced map on free homology,
    and the core-curve classes."""

    __slots__ = ("h1", "cusps", "spec", "filled", "k", "boundary_empty",
                 "n_quot", "s", "i_star", "slope_face_vec", "cores",
                 "sigma_N")

    def __init__(self, h1, cusps, spec, filled, boundary_empty, n_quot,
                 i_star, slope_face_vec, cores):
        self.h1 = h1
        self.cusps = cusps
        self.spec = spec
        self.filled = filled
        self.k = len(filled)
        self.boundary_empty = boundary_empty
        self.n_quot = n_quot
        self.s = n_quot.rank
        self.i_star = i_star
        self.slope_face_vec = slope_face_vec
        self.cores = cores
        self.sigma_N = None


def filled_homology(h1, cusps, spec, eo=None):
    """H_1 data of the filled manifold.

    The quotient is taken in the kernel-coordinate ambient Z^q: the
    base's diagonalised relations plus one slope class per filled cusp.
    When the edge-orientation data of the base is supplied, sigma_N is
    resolved immediately.
    """
    filled = spec.filled_indices()
    for j in filled:
        if not 0 <= j < len(cusps):
            raise CensusError("no cusp with index %d" % j)
    # base relations, rebuilt from the diagonalised quotient
    q = h1.q
    quot = h1.quot
    columns = []
    for p, order in enumerate(quot.orders):
        if order != 0:
            lift = quot.generator_lift(p)
            columns.append([order * x for x in lift])
    slope_face_vec = {}
    for j in filled:
        x, y = spec.slopes[j]
        za, zb = cusps[j].basis
        z = [x * a + y * b for a, b in zip(za, zb)]
        vec = cross_section_to_faces(cusps[j], z)
        slope_face_vec[j] = vec
        columns.append(h1.cycle_kernel_coords(vec))
    n_quot = AbelianQuotient(q, columns)
    s = n_quot.rank
    i_star = None
    if s:
        cols = []
        for pos in quot.free_positions:
            cols.append(n_quot.class_free(quot.generator_lift(pos)))
        i_star = [[cols[i][l] for i in range(len(cols))] for l in range(s)]
        snf = smith_normal_form(i_star, ncols=len(cols))
        assert snf.rank == s and all(d == 1 for d in snf.diag[:s]), \
            "induced map on free homology is not surjective"
    # core-curve classes: a dual slope with unit intersection determinant
    cores = {}
    for j in filled:
        x, y = spec.slopes[j]
        g, u, v = _egcd(x, y)
        assert g == 1
        delta = (-v, u)     # det [[x, -v], [y, u]] = x*u + v*y = 1
        za, zb = cusps[j].basis
        z = [delta[0] * a + delta[1] * b for a, b in zip(za, zb)]
        vec = cross_section_to_faces(cusps[j], z)
        ell_free = n_quot.class_free(h1.cycle_kernel_coords(vec))
        cores[j] = {"delta": delta, "ell_free": tuple(ell_free),
                    "nontrivial": any(e != 0 for e in ell_free)}
    fh = FilledHomology(h1, cusps, spec, filled,
                        len(filled) == len(cusps), n_quot, i_star,
                        slope_face_vec, cores)
    if eo is not None:
        fh.sigma_N = vN_edge_orientable(eo, fh)
    return fh


def vN_edge_orientable(eo, fh):
    """sigma_N when the edge-orientation homomorphism factors through
    the filled manifold's free homology, else None.

    Factoring requires: the base factorization exists, every filled
    slope is orientation-preserving (omega = 0), and omega kills the
    torsion of H_1(N)."""
    if not eo.sigma_exists:
        return None
    for j in fh.filled:
        if eo.omega_of_cycle_vec(fh.slope_face_vec[j]) != 0:
            return None
    for p in fh.n_quot.torsion_positions:
        if _omega_kernel_vec(fh.h1, eo.beta, fh.n_quot.generator_lift(p)):
            return None
    return tuple(
        -1 if _omega_kernel_vec(fh.h1, eo.beta, fh.n_quot.generator_lift(p))
        else 1
        for p in fh.n_quot.free_positions)


def specialise_under_filling(poly, fh):
    """Push a polynomial over the base's free homology into the filled
    manifold's: the monomial substitution along i_star."""
    if fh.s == 0:
        raise CensusError("filled manifold has no free homology "
                          "(b_1(N) = 0); specialisation undefined")
    return specialize(poly, fh.i_star)


class PredictedAlexander:
    """Outcome of inverting the filling identity for Delta_N."""

    __slots__ = ("case", "candidate", "division_ok", "equality_expected")

    def __init__(self, case, candidate, division_ok, equality_expected):
        self.case = case
        self.candidate = candidate
        self.division_ok = division_ok
        self.equality_expected = equality_expected


def predict_filled_alexander(theta, fh, b1_M=None):
    """Solve the filling identity for the filled manifold's Alexander
    polynomial (up to a unit).

    The specialised taut polynomial equals the sign-twisted Delta_N
    times a product of core-class factors, divided by one or two
    (h - sigma_N(h)) factors in the rank-one-target cases.  A failed
    exact division is reported in the result, not raised: it signals a
    violated hypothesis.
    """
    if b1_M is None:
        b1_M = fh.h1.rank
    if fh.s == 0:
        raise CensusError("b_1(N) = 0: the filling identity needs "
                          "positive rank")
    if fh.sigma_N is None:
        raise CensusError("sigma_N does not exist for this filling")
    for j in fh.filled:
        if not fh.cores[j]["nontrivial"]:
            raise CensusError(
                "core curve of cusp %d is trivial in free homology; "
                "the filling identity does not apply" % j)
    s = fh.s
    if b1_M >= 2:
        if s >= 2:
            case, e = "I(a)", 0
        elif not fh.boundary_empty:
            case, e = "I(b)-boundary", 1
        else:
            case, e = "I(b)-closed", 2
    else:
        if not fh.boundary_empty:
            case, e = "II(a)", 0
        else:
            case, e = "II(b)", 1
    i_theta = specialise_under_filling(theta, fh)
    numer = i_theta
    if e:
        h_factor = LaurentPoly(s, {
            tuple(1 if i == 0 else 0 for i in range(s)): 1,
            (0,) * s: -fh.sigma_N[0]})
        for _ in range(e):
            numer = numer * h_factor
    denom = LaurentPoly.one(s)
    for j in fh.filled:
        ell = fh.cores[j]["ell_free"]
        sig_ell = 1
        for sg, exp in zip(fh.sigma_N, ell):
            if sg == -1 and exp % 2:
                sig_ell = -sig_ell
        denom = denom * LaurentPoly(s, {tuple(ell): 1, (0,) * s: -sig_ell})
    quotient = exact_div(numer, denom)
    if quotient is None:
        return PredictedAlexander(case, None, False,
                                  _equality_conditions(fh, b1_M))
    # undo the sign twist: Delta_N(h) = quotient(sigma_N(h) * h)
    candidate = sign_twist(quotient, fh.sigma_N)
    return PredictedAlexander(case, candidate, True,
                              _equality_conditions(fh, b1_M))


def _equality_conditions(fh, b1_M):
    """The specialised taut polynomial equals Delta_N up to variable
    signs exactly in four situations."""
    generates = {j: fh.s == 1 and fh.cores[j]["ell_free"] in ((1,), (-1,))
                 for j in fh.filled}
    if fh.k == 0:
        return True
    if fh.s == 1 and not fh.boundary_empty and fh.k == 1 and \
            all(generates.values()):
        return True
    if fh.s == 1 and fh.boundary_empty and fh.k == 2 and \
            all(generates.values()):
        return True
    if b1_M == 1 and fh.boundary_empty and all(generates.values()):
        return True
    return False


def orientable_class_parity(coeffs, sigma_n):
    """Parity test for a primitive class written in the dual basis of
    the free homology: each coefficient must be odd exactly at the
    generators where sigma_N is -1."""
    if len(coeffs) != len(sigma_n):
        raise ValueError("coefficient count does not match sigma_N")
    return all((a % 2 == 1) == (sg == -1)
               for a, sg in zip(coeffs, sigma_n))
