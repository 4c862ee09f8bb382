"""Exact integer linear algebra for triangulation homology.

Everything here is generic over integer matrices: Smith normal form with
full (inverse-tracked) transforms, finitely generated abelian quotients
Z^q / (column span), first homology of the tetrahedra/faces/edges chain
complex, and the dual-graph spanning tree with its face cocycle used to
label matrix entries elsewhere.

Matrices are plain lists of rows of Python ints (arbitrary precision).
"""


def int_identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def int_matmul(A, B):
    """Product of two list-of-rows integer matrices."""
    if not A:
        return []
    inner = len(A[0])
    ncols = len(B[0]) if B else 0
    assert inner == len(B)
    out = []
    for row in A:
        out_row = []
        for j in range(ncols):
            s = 0
            for k in range(inner):
                a = row[k]
                if a:
                    s += a * B[k][j]
            out_row.append(s)
        out.append(out_row)
    return out


def int_matvec(A, v):
    return [sum(a * x for a, x in zip(row, v) if a) for row in A]


class SNFResult:
    """Smith normal form D = U * A * V with unimodular U, V.

    diag holds the diagonal of D (length min(m, n), divisibility chain,
    non-negative); rank is the number of nonzero diagonal entries.
    Uinv and Vinv are maintained alongside U and V so callers can move
    coordinates in both directions without re-inverting.
    """

    __slots__ = ("m", "n", "diag", "rank", "U", "Uinv", "V", "Vinv")

    def __init__(self, m, n, diag, rank, U, Uinv, V, Vinv):
        self.m = m
        self.n = n
        self.diag = diag
        self.rank = rank
        self.U = U
        self.Uinv = Uinv
        self.V = V
        self.Vinv = Vinv


def smith_normal_form(A, ncols=None):
    """Compute the Smith normal form of an integer matrix.

    A is a list of rows; ncols disambiguates the width when A has no rows.
    Pivoting is deterministic: the smallest nonzero entry in absolute
    value, ties broken by position.
    """
    m = len(A)
    n = len(A[0]) if m else (0 if ncols is None else ncols)
    if m and ncols is not None:
        assert n == ncols
    D = [list(row) for row in A]
    U, Uinv = int_identity(m), int_identity(m)
    V, Vinv = int_identity(n), int_identity(n)

    # Row/column operations, mirrored onto the transforms.  For U' = E*U the
    # inverse picks up E^-1 on the right, which is the corresponding column
    # operation on Uinv (and dually for V).
    def swap_rows(i, j):
        if i == j:
            return
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]
        for row in Uinv:
            row[i], row[j] = row[j], row[i]

    def swap_cols(i, j):
        if i == j:
            return
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]
        Vinv[i], Vinv[j] = Vinv[j], Vinv[i]

    def add_row(i, j, c):
        # row_i += c * row_j
        if c == 0:
            return
        Di, Dj = D[i], D[j]
        for k in range(n):
            Di[k] += c * Dj[k]
        Ui, Uj = U[i], U[j]
        for k in range(m):
            Ui[k] += c * Uj[k]
        for row in Uinv:
            row[j] -= c * row[i]

    def add_col(j, i, c):
        # col_j += c * col_i
        if c == 0:
            return
        for row in D:
            row[j] += c * row[i]
        for row in V:
            row[j] += c * row[i]
        Vi = Vinv[i]
        Vj = Vinv[j]
        for k in range(n):
            Vi[k] -= c * Vj[k]

    def negate_row(i):
        D[i] = [-x for x in D[i]]
        U[i] = [-x for x in U[i]]
        for row in Uinv:
            row[i] = -row[i]

    k = 0
    limit = min(m, n)
    while k < limit:
        # locate pivot: smallest |entry| in the trailing submatrix
        piv = None
        best = None
        for i in range(k, m):
            row = D[i]
            for j in range(k, n):
                x = row[j]
                if x and (best is None or abs(x) < best):
                    best = abs(x)
                    piv = (i, j)
        if piv is None:
            break
        swap_rows(k, piv[0])
        swap_cols(k, piv[1])
        while True:
            restart = False
            for i in range(k + 1, m):
                if D[i][k]:
                    q = D[i][k] // D[k][k]
                    add_row(i, k, -q)
                    if D[i][k]:
                        # remainder is strictly smaller; make it the pivot
                        swap_rows(k, i)
                        restart = True
                        break
            if restart:
                continue
            for j in range(k + 1, n):
                if D[k][j]:
                    q = D[k][j] // D[k][k]
                    add_col(j, k, -q)
                    if D[k][j]:
                        swap_cols(k, j)
                        restart = True
                        break
            if restart:
                continue
            # enforce the divisibility chain: pull any offending row up
            piv_val = D[k][k]
            bad = None
            for i in range(k + 1, m):
                row = D[i]
                for j in range(k + 1, n):
                    if row[j] % piv_val:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is not None:
                add_row(k, bad, 1)
                continue
            break
        if D[k][k] < 0:
            negate_row(k)
        k += 1

    diag = [D[i][i] for i in range(limit)]
    rank = sum(1 for d in diag if d)
    if __debug__:
        UAV = int_matmul(int_matmul(U, [list(r) for r in A]), V)
        assert UAV == D, "SNF transform mismatch"
        assert int_matmul(U, Uinv) == int_identity(m)
        assert int_matmul(V, Vinv) == int_identity(n)
        for i in range(rank - 1):
            assert diag[i + 1] % diag[i] == 0, "SNF divisibility chain broken"
    return SNFResult(m, n, diag, rank, U, Uinv, V, Vinv)


class AbelianQuotient:
    """The abelian group Z^q / (column span of an integer relation matrix).

    orders[i] gives the order of the i-th diagonal generator after the
    change of basis w = U * v: 0 for an infinite-order (free) generator,
    1 for a trivial one, d > 1 for torsion Z/d.
    """

    __slots__ = ("q", "snf", "orders", "rank", "torsion",
                 "free_positions", "torsion_positions")

    def __init__(self, q, relation_columns):
        self.q = q
        R = [[col[i] for col in relation_columns] for i in range(q)]
        self.snf = smith_normal_form(R, ncols=len(relation_columns))
        diag = self.snf.diag
        self.orders = [diag[i] if i < len(diag) else 0 for i in range(q)]
        self.free_positions = [i for i, d in enumerate(self.orders) if d == 0]
        self.torsion_positions = [i for i, d in enumerate(self.orders)
                                  if d > 1]
        self.rank = len(self.free_positions)
        self.torsion = [self.orders[i] for i in self.torsion_positions]

    def full_coords(self, vec):
        """Coordinates of vec in the diagonalising basis (w = U * vec)."""
        assert len(vec) == self.q
        return int_matvec(self.snf.U, vec)

    def class_coords(self, vec):
        """(free part, torsion part) of the class of vec in the quotient."""
        w = self.full_coords(vec)
        free = tuple(w[i] for i in self.free_positions)
        tors = tuple(w[i] % self.orders[i] for i in self.torsion_positions)
        return free, tors

    def class_free(self, vec):
        return self.class_coords(vec)[0]

    def generator_lift(self, position):
        """A vector in Z^q mapping to the generator at a diagonal position."""
        return [row[position] for row in self.snf.Uinv]


class H1Data:
    """First homology of the dual 2-complex (tets <- faces <- edges).

    d1 (n_tets x n_faces) sends a face to (tet above) - (tet below); d2
    (n_faces x n_edges) sends an edge to its signed cycle of incident
    faces.  Homology classes of face-space cycles are reported in the
    coordinates of an AbelianQuotient on the kernel of d1.
    """

    __slots__ = ("n_tets", "n_faces", "n_edges", "rank", "torsion",
                 "snf1", "quot", "q")

    def __init__(self, n_tets, n_faces, n_edges, d1, d2):
        if __debug__:
            prod = int_matmul(d1, d2)
            assert all(all(x == 0 for x in row) for row in prod), \
                "d1 * d2 != 0"
        self.n_tets = n_tets
        self.n_faces = n_faces
        self.n_edges = n_edges
        self.snf1 = smith_normal_form(d1, ncols=n_faces)
        rho = self.snf1.rank
        self.q = n_faces - rho
        # express boundaries in kernel coordinates: rows rho.. of Vinv * d2
        M = int_matmul(self.snf1.Vinv, d2) if n_edges else \
            [[] for _ in range(n_faces)]
        for i in range(rho):
            assert all(x == 0 for x in M[i]), "im d2 not inside ker d1"
        columns = [[M[rho + i][j] for i in range(self.q)]
                   for j in range(n_edges)]
        self.quot = AbelianQuotient(self.q, columns)
        self.rank = self.quot.rank
        self.torsion = self.quot.torsion

    def cycle_kernel_coords(self, z):
        """Coordinates of a face-space cycle in the kernel basis of d1."""
        u = int_matvec(self.snf1.Vinv, z)
        rho = self.snf1.rank
        if any(u[i] for i in range(rho)):
            raise ValueError("vector is not a cycle")
        return u[rho:]

    def cycle_w(self, z):
        return self.quot.full_coords(self.cycle_kernel_coords(z))

    def cycle_class_full(self, z):
        return self.quot.class_coords(self.cycle_kernel_coords(z))

    def cycle_class_free(self, z):
        return self.quot.class_free(self.cycle_kernel_coords(z))

    def w_position_representative(self, position):
        """A face-space cycle whose class is the given diagonal generator."""
        y = self.quot.generator_lift(position)
        rho = self.snf1.rank
        V = self.snf1.V
        return [sum(V[f][rho + i] * y[i] for i in range(self.q))
                for f in range(self.n_faces)]


def dual_spanning_tree(n_tets, face_ends, face_priority=None):
    """BFS spanning tree of the dual graph (vertices tets, edges faces).

    face_ends[f] = (below tet, above tet).  Returns (tree_faces, parent)
    where parent[t] = (parent tet, face, sign) and sign is +1 when the
    step parent -> t crosses the face in its coorientation direction
    (below to above).  ``face_priority`` reorders the BFS neighbour
    scan, which selects a different (equally valid) tree.
    """
    adj = {}
    for f, (b, a) in enumerate(face_ends):
        adj.setdefault(b, []).append((f, a, 1))
        adj.setdefault(a, []).append((f, b, -1))
    if face_priority is None:
        key = None
    else:
        def key(item):
            return (face_priority[item[0]],) + item
    tree_faces = set()
    parent = {0: None}
    queue = [0]
    while queue:
        t = queue.pop(0)
        for f, t2, sign in sorted(adj.get(t, []), key=key):
            if t2 not in parent:
                parent[t2] = (t, f, sign)
                tree_faces.add(f)
                queue.append(t2)
    assert len(parent) == n_tets, "dual graph is disconnected"
    return tree_faces, parent


def _path_to_root(t, parent, n_faces):
    """Signed face vector of the tree walk from t to the root."""
    vec = [0] * n_faces
    while parent[t] is not None:
        pt, f, sign = parent[t]
        # parent -> t crosses with `sign`; we walk t -> parent
        vec[f] -= sign
        t = pt
    return vec


def face_cocycle(h1, face_ends, tree_faces, parent):
    """Free H1 class of the fundamental cycle of each non-tree face.

    Tree faces get the zero class.  For any face-space cycle z we then
    have class_free(z) = sum_f c[f] * z[f], which is what turns local
    crossing data into group-ring exponents.
    """
    n_faces = h1.n_faces
    rank = h1.rank
    zero = (0,) * rank
    c = []
    for f, (b, a) in enumerate(face_ends):
        if f in tree_faces:
            c.append(zero)
            continue
        z = [0] * n_faces
        z[f] += 1
        pa = _path_to_root(a, parent, n_faces)
        pb = _path_to_root(b, parent, n_faces)
        for i in range(n_faces):
            z[i] += pa[i] - pb[i]
        c.append(h1.cycle_class_free(z))
    return c
