"""Presentation matrices over the group ring of first homology, their
Fitting gcds, and the polynomial report with identity verification.

Lift bookkeeping.  Fix the spanning-tree cocycle c on faces (zero on
tree faces).  Walking around an edge class from its canonical corner
and accumulating +/- c(face crossed) gives each corner a vector label
u; the corner's edge in the universal free-abelian cover, seen from the
base lift of the corner's tetrahedron, is the deck translate by -u of
the class's anchored lift.  Hence every matrix entry contributed by an
incidence carries the monomial with exponent -u of that corner.
"""

from .homology import dual_spanning_tree, face_cocycle, smith_normal_form
from .laurent import (LaurentMatrix, LaurentPoly, exact_div, gcd_many,
                      maximal_minor_gcd_bruteforce, normalize_unit,
                      sign_twist, specialize)
from . import taut


class Analysis:
    """Everything derived from one taut structure that the matrix
    builders need.  The keyword knobs select alternative presentation
    choices (used to test presentation independence)."""

    def __init__(self, ts, flip_coorientation=False, corner_rank=0,
                 face_priority=None):
        self.ts = ts
        table = ts.table
        coor = taut.derive_coorientation(ts)
        if flip_coorientation:
            coor = coor.flipped(ts)
        self.coor = coor
        self.colours = taut.derive_colouring(ts)
        self.cycles = taut.edge_corner_cycles(ts, coor,
                                              corner_rank=corner_rank)
        self.h1 = taut.compute_h1(ts, coor, self.cycles)
        self.eo = taut.edge_orientation_data(ts, coor, self.colours,
                                             self.cycles, self.h1)
        self.tracks = taut.track_slots(ts, coor)
        self.face_ends = [(coor.below[i][0], coor.above[i][0])
                          for i in range(len(table.faces))]
        self.tree, self.parent = dual_spanning_tree(
            table.n_tet, self.face_ends, face_priority=face_priority)
        self.cocycle = face_cocycle(self.h1, self.face_ends, self.tree,
                                    self.parent)
        self.labels = corner_labels(self.cycles, self.cocycle, self.h1.rank)
        self.ref_dir = {}
        for cyc in self.cycles:
            for corner, dirpair in zip(cyc.corners, cyc.dirs):
                self.ref_dir[corner] = dirpair


def corner_labels(cycles, cocycle, rank):
    """Deck-translation label of every corner: the signed partial sum of
    the face cocycle along the corner cycle from the canonical corner."""
    labels = {}
    for cyc in cycles:
        u = (0,) * rank
        for corner, (face_idx, eps) in zip(cyc.corners, cyc.crossings):
            labels[corner] = u
            u = tuple(a + eps * b for a, b in zip(u, cocycle[face_idx]))
        assert u == (0,) * rank, "cocycle does not close around an edge"
    return labels


def _entry_monomial(analysis, t, es, coef):
    exp = tuple(-x for x in analysis.labels[(t, es)])
    return LaurentPoly.monomial(analysis.h1.rank, exp, coef)


def build_taut_matrix(analysis):
    """Rows = edges, columns = faces; +monomial at the face's upper-large
    edge, -monomial at its two small edges, coincident rows summed."""
    table = analysis.ts.table
    r = analysis.h1.rank
    rows = [[LaurentPoly.zero(r) for _ in table.faces] for _ in table.edges]
    for idx in range(len(table.faces)):
        t_b, fs_b = analysis.coor.below[idx]
        upper_large = analysis.tracks[idx][1]
        for es in taut.FACE_SLOTS[fs_b]:
            sign = 1 if es == upper_large else -1
            e = table.edge_index[(t_b, es)]
            rows[e][idx] = rows[e][idx] + _entry_monomial(
                analysis, t_b, es, sign)
    return LaurentMatrix(r, rows)


# boundary traversal of a triangle [a,b,c] (a<b<c): +ab, +bc, -ac
_TRAVERSAL = (((0, 1), 1), ((1, 2), 1), ((0, 2), -1))


def build_alexander_matrix(analysis):
    """Rows = edges, columns = faces; entries are the signed monomial
    boundary of the face's base lift.  The face is oriented as part of
    the boundary of the positively oriented tetrahedron below it, and
    each edge's sign compares that traversal with the class's reference
    orientation."""
    table = analysis.ts.table
    r = analysis.h1.rank
    rows = [[LaurentPoly.zero(r) for _ in table.faces] for _ in table.edges]
    for idx in range(len(table.faces)):
        t_b, fs_b = analysis.coor.below[idx]
        verts = [v for v in range(4) if v != fs_b]
        face_sign = -1 if fs_b % 2 else 1
        for (i, j), tsign in _TRAVERSAL:
            a, b = verts[i], verts[j]
            es = taut.SLOT_OF_PAIR[(a, b)]
            agree = 1 if analysis.ref_dir[(t_b, es)] == (a, b) else -1
            coef = face_sign * tsign * agree
            e = table.edge_index[(t_b, es)]
            rows[e][idx] = rows[e][idx] + _entry_monomial(
                analysis, t_b, es, coef)
    return LaurentMatrix(r, rows)


def unit_pivot_reduce(mat):
    """Shrink a presentation matrix by pivoting on unit (+-monomial)
    entries: clear the pivot row by column operations, then drop the
    pivot row and column.  Preserves the gcd of maximal minors up to a
    unit.  Returns (residual row list, saw_zero_row)."""
    entries = [list(row) for row in mat.entries]
    while True:
        for row in entries:
            if all(p.is_zero() for p in row):
                return entries, True
        pivot = None
        for i, row in enumerate(entries):
            for j, p in enumerate(row):
                if p.is_unit():
                    pivot = (i, j)
                    break
            if pivot:
                break
        if pivot is None:
            return entries, False
        i, j = pivot
        piv = entries[i][j]
        inv = piv.unit_inverse()
        ncols = len(entries[0])
        for k in range(ncols):
            if k == j or entries[i][k].is_zero():
                continue
            factor = entries[i][k] * inv
            for row in entries:
                row[k] = row[k] - factor * row[j]
        entries.pop(i)
        for row in entries:
            row.pop(j)
        if not entries:
            return entries, False


def fitting_gcd(mat):
    """gcd of all maximal (row-count) minors of a Laurent matrix with
    rows <= columns: unit-pivot reduction, then row-content extraction,
    then a gcd over the residual minors in deterministic column order."""
    nrows = len(mat.entries)
    ncols = len(mat.entries[0]) if nrows else 0
    if nrows > ncols:
        raise ValueError("presentation matrix needs rows <= columns")
    if nrows == 0:
        return LaurentPoly.one(mat.nvars)
    residual, saw_zero_row = unit_pivot_reduce(mat)
    if saw_zero_row:
        return LaurentPoly.zero(mat.nvars)
    if not residual:
        return LaurentPoly.one(mat.nvars)
    # every maximal minor uses every row, so a common row factor divides
    # all of them and can be pulled out
    content = LaurentPoly.one(mat.nvars)
    reduced = []
    for row in residual:
        g = gcd_many(row)
        if not g.is_one():
            row = [exact_div(p, g) for p in row]
            assert all(p is not None for p in row)
        content = content * g
        reduced.append(row)
    rest = maximal_minor_gcd_bruteforce(LaurentMatrix(mat.nvars, reduced))
    return normalize_unit(content * rest)


class PolyReport:
    """The computed invariants of one census entry."""

    __slots__ = ("sig", "rank", "torsion", "edge_orientable",
                 "edge_orientable_fab", "sigma", "theta", "delta",
                 "delta_hat")

    def __init__(self, sig, rank, torsion, edge_orientable,
                 edge_orientable_fab, sigma, theta, delta, delta_hat):
        self.sig = sig
        self.rank = rank
        self.torsion = torsion
        self.edge_orientable = edge_orientable
        self.edge_orientable_fab = edge_orientable_fab
        self.sigma = sigma
        self.theta = theta
        self.delta = delta
        self.delta_hat = delta_hat


def cover_pushforward(analysis, cover_analysis):
    """Matrix of the projection from the double cover's free first
    homology onto the base's: project each cover generator's dual cycle
    down to the base (face by face, signs preserved) and read off its
    class.  Surjective whenever the cover is connected, i.e. whenever
    the map is needed."""
    base_table = analysis.ts.table
    cover_table = cover_analysis.ts.table
    n = base_table.n_tet
    cover_h1 = cover_analysis.h1
    base_of_cover_face = []
    for (t, fs), _ in cover_table.faces:
        base_of_cover_face.append(base_table.face_index[(t % n, fs)])
    columns = []
    for pos in cover_h1.quot.free_positions:
        zhat = cover_h1.w_position_representative(pos)
        base_z = [0] * len(base_table.faces)
        for fc, val in enumerate(zhat):
            base_z[base_of_cover_face[fc]] += val
        columns.append(analysis.h1.cycle_class_free(base_z))
    A = [[col[l] for col in columns] for l in range(analysis.h1.rank)]
    snf = smith_normal_form(A, ncols=len(columns))
    assert snf.rank == analysis.h1.rank and \
        all(d == 1 for d in snf.diag[:snf.rank]), \
        "cover homology does not surject onto the base"
    return A


def compute_polynomials(ts):
    analysis = Analysis(ts)
    theta = fitting_gcd(build_taut_matrix(analysis))
    delta = fitting_gcd(build_alexander_matrix(analysis))
    eo = analysis.eo
    delta_hat = None
    if not eo.sigma_exists:
        cover, connected = taut.build_double_cover(ts, analysis.coor,
                                                   eo.beta)
        assert connected, "cover of a non-edge-orientable structure " \
                          "must be connected"
        cover_analysis = Analysis(cover)
        A = cover_pushforward(analysis, cover_analysis)
        cover_alex = build_alexander_matrix(cover_analysis)
        pushed = LaurentMatrix(analysis.h1.rank, [
            [specialize(p, A) for p in row] for row in cover_alex.entries])
        delta_hat = fitting_gcd(pushed)
    return PolyReport(
        sig=ts.sig, rank=analysis.h1.rank, torsion=list(analysis.h1.torsion),
        edge_orientable=eo.edge_orientable,
        edge_orientable_fab=eo.sigma_exists, sigma=eo.sigma,
        theta=theta, delta=delta, delta_hat=delta_hat)


def verify_identities(report):
    """Check the sign-twist / cover-product identities on a report.
    Failures are recorded, not raised."""
    record = {}
    theta_n = normalize_unit(report.theta)
    if report.edge_orientable_fab:
        record["identity"] = "sign_twist"
        twisted = normalize_unit(sign_twist(report.delta, report.sigma))
        record["passed"] = theta_n == twisted
        record["delta_hat_absent"] = report.delta_hat is None
        record["passed"] = record["passed"] and record["delta_hat_absent"]
    else:
        record["identity"] = "cover_product"
        ok = report.delta_hat is not None and \
            normalize_unit(report.delta_hat) == \
            normalize_unit(report.delta * report.theta)
        record["passed"] = ok
    # parity consequence: when no plain sign change of variables turns
    # delta into theta, the torsion of H1 must have even order
    r = report.rank
    matched = False
    if r <= 12:
        for mask in range(1 << r):
            chi = tuple(-1 if (mask >> i) & 1 else 1 for i in range(r))
            if theta_n == normalize_unit(sign_twist(report.delta, chi)):
                matched = True
                break
        record["sign_change_match"] = matched
        if not matched:
            order = 1
            for d in report.torsion:
                order *= d
            record["even_torsion"] = (order % 2 == 0)
    return record
