"""
Newton 多面体与对偶锥

功能：
1. RationalCone：有理多面锥 (生成元 + 等式/不等式描述，区分开/闭)
2. newton_polyhedron：ppl 求顶点与刻面，再由刻面求交得到完整面格
3. l_gamma / sigma：支撑函数与对偶锥 σ(γ)
4. 倚靠面 (γ + R^I 仍是面)、极大倚靠集合、R^{n1}_{>=0} x R^{n2}_{>0} 的标准剖分
5. fan_check：扇的公理 (面封闭、相对内部两两不交)，用 NNC 多面体求见证点

坐标下标内部从 0 开始，报告中从 1 开始。
"""

from dataclasses import dataclass, field
from itertools import combinations, product

from .exact_geometry import (
    dot, rank, cone_from_generators, cone_from_constraints, cone_constraints, cone_rays, polyhedron_hull,
    system_point,
)
from .lattice import primitive
from .utils import Logger, ConsistencyError, PartitionError


def _fmt_set(indices):
    return "{" + ",".join(str(i + 1) for i in sorted(indices)) + "}"


# === 有理锥 ===

class RationalCone:
    """
    闭包由 generators 生成；equalities 为 e . x = 0，inequalities 为 (u, strict)。
    相对开锥 = 全部刻面不等式取严格。
    """

    def __init__(self, ambient_dim, generators, equalities, inequalities):
        self.ambient_dim = ambient_dim
        self.generators = tuple(sorted(set(tuple(g) for g in generators)))
        self.equalities = tuple(tuple(e) for e in equalities)
        self.inequalities = tuple((tuple(u), bool(s)) for u, s in inequalities)
        self._facets = None
        self._faces = None

    @classmethod
    def from_generators(cls, generators, ambient_dim=None, relatively_open=True):
        gens = sorted({primitive(g) for g in generators if any(g)})
        if ambient_dim is None:
            ambient_dim = len(gens[0])
        equalities, _ = cone_constraints(cone_from_generators(gens, ambient_dim), ambient_dim)
        cone = cls(ambient_dim, gens, equalities, [])
        cone.inequalities = tuple((u, relatively_open) for u, _ in cone.facets())
        return cone

    @classmethod
    def from_inequalities(cls, ambient_dim, inequalities, equalities=()):
        """由 H 数据构造 (可部分开)；闭包生成元取放松后闭锥的极射线"""
        inequalities = [(tuple(u), bool(s)) for u, s in inequalities]
        closed = cone_from_constraints(ambient_dim, equalities, [(u, False) for u, _ in inequalities])
        gens = cone_rays(closed, ambient_dim)
        cone = cls(ambient_dim, gens, equalities, inequalities)
        if not cone.is_nonempty():
            Logger.debug("from_inequalities: 相对开部分为空")
        return cone

    @property
    def dim(self):
        return rank(list(self.generators)) if self.generators else 0

    @property
    def relatively_open(self):
        return all(s for _, s in self.inequalities)

    def closure(self):
        return RationalCone(self.ambient_dim, self.generators, self.equalities,
                            [(u, False) for u, _ in self.inequalities])

    def relint(self):
        return RationalCone.from_generators(self.generators, self.ambient_dim, relatively_open=True)

    def contains(self, x):
        if any(dot(e, x) != 0 for e in self.equalities):
            return False
        for u, strict in self.inequalities:
            value = dot(u, x)
            if value < 0 or (strict and value == 0):
                return False
        return True

    def contains_closed(self, x):
        if any(dot(e, x) != 0 for e in self.equalities):
            return False
        return all(dot(u, x) >= 0 for u, _ in self.inequalities)

    def is_nonempty(self):
        """开锥非空 (含原点的闭锥总是非空)"""
        return system_point(self.ambient_dim, self.equalities, self.inequalities) is not None

    def relint_point(self, subset=None):
        gens = self.generators if subset is None else [self.generators[i] for i in subset]
        return tuple(sum(g[i] for g in gens) for i in range(self.ambient_dim))

    def facets(self):
        """闭包的刻面：[(内法向 u, 刻面上生成元下标集合)]，u 模等式子空间确定"""
        if self._facets is not None:
            return self._facets
        gens = self.generators
        found = {}
        if gens:
            _, normals = cone_constraints(cone_from_generators(gens, self.ambient_dim), self.ambient_dim)
            for u in normals:
                on = frozenset(i for i, g in enumerate(gens) if dot(u, g) == 0)
                found.setdefault(on, u)
        self._facets = sorted(((u, on) for on, u in found.items()), key=lambda t: sorted(t[1]))
        return self._facets

    def faces(self):
        """全部面 (生成元下标集合)，含 {0} (空集) 与锥本身"""
        if self._faces is not None:
            return self._faces
        full = frozenset(range(len(self.generators)))
        facet_sets = [on for _, on in self.facets()]
        faces = {full}
        frontier = list(facet_sets)
        while frontier:
            face = frontier.pop()
            if face in faces:
                continue
            faces.add(face)
            for f in facet_sets:
                inter = face & f
                if inter not in faces:
                    frontier.append(inter)
        if self.dim > 0 and facet_sets:
            faces.add(frozenset())
        self._faces = sorted(faces, key=lambda s: (len(s), sorted(s)))
        return self._faces

    def face_cone(self, subset, relatively_open=False):
        gens = [self.generators[i] for i in subset]
        return RationalCone.from_generators(gens, self.ambient_dim, relatively_open=relatively_open)

    def to_dict(self):
        return {
            "dim": self.dim,
            "generators": [list(g) for g in self.generators],
            "equalities": [list(e) for e in self.equalities],
            "inequalities": [{"normal": list(u), "strict": s} for u, s in self.inequalities],
            "relatively_open": self.relatively_open,
        }

    def __repr__(self):
        kind = "open" if self.relatively_open else "closed"
        return f"RationalCone({kind}, gens={list(self.generators)})"


def same_cone(a, b):
    """两个闭锥作为点集相等"""
    return all(b.contains_closed(g) for g in a.generators) and \
        all(a.contains_closed(g) for g in b.generators)


def is_face_of(small, big):
    """small (闭锥) 是否为 big 的面"""
    if not all(big.contains_closed(g) for g in small.generators):
        return False
    if not small.generators:
        return True
    for subset in big.faces():
        if same_cone(big.face_cone(subset), small):
            return True
    return False


# === Newton 多面体 ===

@dataclass(frozen=True)
class Facet:
    normal: tuple
    offset: int
    vertex_ids: frozenset
    recession: frozenset


@dataclass(frozen=True)
class Face:
    id: int
    vertex_ids: tuple
    vertices: tuple
    recession: tuple
    dim: int
    compact: bool
    coordinate_planes: tuple
    facet_ids: tuple
    equations: tuple
    label: str
    owner: frozenset = field(repr=False)

    @property
    def is_whole(self):
        return not self.facet_ids

    def contains(self, b):
        """b 属于 Γ 时判断 b 是否落在此面上"""
        return all(dot(w, b) == off for w, off in self.equations)

    def to_dict(self):
        return {
            "label": self.label,
            "vertices": [list(v) for v in self.vertices],
            "recession": [i + 1 for i in self.recession],
            "dim": self.dim,
            "compact": self.compact,
            "coordinate_planes": [i + 1 for i in self.coordinate_planes],
        }


class NewtonPolyhedron:
    def __init__(self, n, points, vertices, facets, faces):
        self.n = n
        self.points = points
        self.vertices = vertices
        self.facets = facets
        self.faces = faces
        self.owner = frozenset(points)
        self._index = {(f.vertex_ids, f.recession): f for f in faces}

    @property
    def whole(self):
        return self.faces[-1]

    def face(self, vertex_ids, recession=()):
        return self._index.get((tuple(sorted(vertex_ids)), tuple(sorted(recession))))

    def compact_faces(self):
        return [f for f in self.faces if f.compact]

    def proper_faces(self):
        return [f for f in self.faces if not f.is_whole]

    def vertex_label(self, i):
        return f"P{i + 1}"

    def contains(self, b):
        return all(dot(f.normal, b) >= f.offset for f in self.facets)

    def to_dict(self):
        return {
            "n": self.n,
            "vertices": {self.vertex_label(i): list(v) for i, v in enumerate(self.vertices)},
            "facets": [{"normal": list(f.normal), "offset": f.offset} for f in self.facets],
            "compact_faces": [f.to_dict() for f in self.compact_faces()],
            "faces": [f.to_dict() for f in self.proper_faces()],
        }


def newton_polyhedron(supp, n):
    """
    Γ = conv(supp) + R^n_{>=0}。
    ppl 给出最小化的顶点与刻面 <w,b> >= offset；刻面法向量取本原并按支撑重算 offset。
    """
    points = tuple(sorted({tuple(int(x) for x in p) for p in supp}))
    if not points:
        raise ValueError("empty support")
    units = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    hull_vertices, hull_facets = polyhedron_hull(points, units, n)
    normals = {primitive(w) for w, _ in hull_facets}
    if any(x < 0 for w in normals for x in w):
        raise ConsistencyError("Newton polyhedron produced a facet normal with a negative entry")
    raw_facets = sorted((w, min(dot(w, p) for p in points)) for w in normals)

    vertices = sorted((tuple(int(x) for x in v) for v in hull_vertices), reverse=True)
    if not set(vertices) <= set(points):
        raise ConsistencyError("Newton polyhedron has a vertex outside the support")

    facets = []
    for w, off in raw_facets:
        vids = frozenset(i for i, v in enumerate(vertices) if dot(w, v) == off)
        facets.append(Facet(w, off, vids, frozenset(i for i in range(n) if w[i] == 0)))

    keys = set()
    frontier = [(f.vertex_ids, f.recession) for f in facets]
    while frontier:
        key = frontier.pop()
        if key in keys or not key[0]:
            continue
        keys.add(key)
        for f in facets:
            inter = (key[0] & f.vertex_ids, key[1] & f.recession)
            if inter[0] and inter not in keys:
                frontier.append(inter)

    owner = frozenset(points)
    records = []
    for vids, rec in keys:
        vids_t, rec_t = tuple(sorted(vids)), tuple(sorted(rec))
        records.append((vids_t, rec_t, _affine_dim([vertices[i] for i in vids_t], rec_t, n)))
    records.sort(key=lambda r: (r[2], r[0], r[1]))

    faces = []
    for fid, (vids, rec, d) in enumerate(records):
        verts = tuple(vertices[i] for i in vids)
        fids = tuple(j for j, f in enumerate(facets)
                     if set(vids) <= f.vertex_ids and set(rec) <= f.recession)
        planes = tuple(i for i in range(n) if i not in rec and all(v[i] == 0 for v in verts))
        label = "".join(f"P{i + 1}" for i in vids) + (f"+R{_fmt_set(rec)}" if rec else "")
        faces.append(Face(fid, vids, verts, rec, d, not rec, planes, fids,
                          tuple((facets[j].normal, facets[j].offset) for j in fids), label, owner))
    whole_ids = tuple(range(len(vertices)))
    faces.append(Face(len(faces), whole_ids, tuple(vertices), tuple(range(n)), n, False, (), (), (),
                      "Γ", owner))
    poly = NewtonPolyhedron(n, points, tuple(vertices), tuple(facets), tuple(faces))
    Logger.debug(f"Newton 多面体: {len(vertices)} 个顶点, {len(facets)} 个刻面, {len(faces)} 个面")
    return poly


def _affine_dim(verts, recession, n):
    rows = [tuple(a - b for a, b in zip(v, verts[0])) for v in verts[1:]]
    rows += [tuple(int(i == j) for j in range(n)) for i in recession]
    rows = [r for r in rows if any(r)]
    return rank(rows) if rows else 0


def l_gamma(poly, a):
    """(min_{b in Γ} <a,b>, 取到最小值的面 γ_a)；a = 0 时返回 Γ 本身"""
    if any(x < 0 for x in a):
        raise ValueError(f"weight vector {tuple(a)} has a negative entry")
    if not any(a):
        return 0, poly.whole
    values = [dot(a, v) for v in poly.vertices]
    best = min(values)
    vids = tuple(i for i, v in enumerate(values) if v == best)
    rec = tuple(i for i, x in enumerate(a) if x == 0)
    face = poly.face(vids, rec)
    if face is None:
        raise ConsistencyError(f"exposed face for a={tuple(a)} missing from the face lattice")
    return best, face


def sigma(poly, face, relatively_open=True):
    """σ(γ)：包含 γ 的刻面的本原法向量的正组合"""
    if face.is_whole:
        raise ValueError("σ(Γ) is not defined for the whole polyhedron")
    gens = [poly.facets[j].normal for j in face.facet_ids]
    return RationalCone.from_generators(gens, poly.n, relatively_open=relatively_open)


def sigma_contains(poly, face, a):
    """由 l_gamma 判定 a 是否属于 σ(γ)"""
    return l_gamma(poly, a)[1] == face


def leant_faces(poly, face):
    """所有 I 使得 γ + R^I 是 Γ 的面"""
    if not face.compact:
        raise ValueError(f"face {face.label} is not compact")
    sets = [f.recession for f in poly.faces if f.vertex_ids == face.vertex_ids and not f.is_whole]
    return sorted(sets, key=lambda s: (len(s), s))


def leant_sets_in_block(poly, face, n1):
    return [I for I in leant_faces(poly, face) if all(i < n1 for i in I)]


def maximal_leant_sets(poly, face, n1):
    sets = [frozenset(I) for I in leant_sets_in_block(poly, face, n1)]
    maximal = [s for s in sets if not any(s < t for t in sets)]
    return sorted((tuple(sorted(s)) for s in maximal), key=lambda s: (len(s), s))


def vertex_positivity(poly):
    return all(all(x > 0 for x in v) for v in poly.vertices)


# === 标准剖分 ===

@dataclass(frozen=True)
class Cell:
    compact: Face
    face: Face          # ε = γ + R^I
    index_set: tuple    # I
    cone: RationalCone

    @property
    def dim(self):
        return self.cone.dim

    @property
    def label(self):
        return f"{self.compact.label},I={_fmt_set(self.index_set)}"

    def to_dict(self):
        return {
            "face": self.compact.label,
            "I": [i + 1 for i in self.index_set],
            "dim": self.dim,
            "generators": [list(g) for g in self.cone.generators],
        }


def in_region(a, n1):
    """a 属于 R^{n1}_{>=0} x R^{n2}_{>0}"""
    return all(x >= 0 for x in a[:n1]) and all(x > 0 for x in a[n1:])


def canonical_partition(poly, n1, n2):
    """
    R^{n1}_{>=0} x R^{n2}_{>0} 的标准剖分：取 I_ε ⊆ {1..n1} 的面 ε，
    要求其顶点凸包是紧面 γ，单元为 (γ, I_ε, σ(ε))。
    """
    if n1 + n2 != poly.n:
        raise ValueError(f"n1 + n2 = {n1 + n2} differs from n = {poly.n}")
    if n2 < 1:
        raise ValueError("n2 must be >= 1")
    cells = []
    for face in poly.proper_faces():
        if not all(i < n1 for i in face.recession):
            continue
        compact = poly.face(face.vertex_ids, ())
        if compact is None:
            raise PartitionError(
                f"vertex hull of face {face.label} is not an exposed compact face", point=None)
        cells.append(Cell(compact, face, face.recession, sigma(poly, face)))
    cells.sort(key=lambda c: (c.compact.id, len(c.index_set), c.index_set))
    return cells


def sample_region(n, n1, bound):
    ranges = [range(0, bound + 1)] * n1 + [range(1, bound + 1)] * (n - n1)
    return product(*ranges)


def verify_partition(poly, cells, n1, bound):
    """
    格点样本逐点检查：恰好落在一个单元中 (用单元锥自身的 H 表示判定)，
    且该单元就是 l_gamma 给出的面。返回问题列表。
    """
    problems = []
    by_face = {c.face: c for c in cells}
    for a in sample_region(poly.n, n1, bound):
        hits = [c for c in cells if c.cone.contains(a)]
        if len(hits) != 1:
            problems.append(f"a={a} lies in {len(hits)} cells")
            continue
        face = l_gamma(poly, a)[1]
        if by_face.get(face) is not hits[0]:
            problems.append(f"a={a}: face {face.label} does not match cell {hits[0].label}")
    return problems


def partition_diagnostics(poly, cells, n1):
    """倚靠集合的向下封闭性与单元锥的面关系，违反时只报告"""
    notes = []
    for face in poly.compact_faces():
        leant = {frozenset(I) for I in leant_sets_in_block(poly, face, n1)}
        for M in maximal_leant_sets(poly, face, n1):
            for k in range(len(M) + 1):
                for J in combinations(M, k):
                    if frozenset(J) not in leant:
                        notes.append(f"{face.label}: {_fmt_set(J)} ⊆ {_fmt_set(M)} "
                                     f"but {face.label}+R{_fmt_set(J)} is not a face")
    by_key = {(c.compact.id, frozenset(c.index_set)): c for c in cells}
    for (fid, I), cell in by_key.items():
        for (gid, J), other in by_key.items():
            if gid != fid or not J < I:
                continue
            if not is_face_of(cell.cone.closure(), other.cone.closure()):
                notes.append(f"closure of cone {cell.label} is not a face of closure of {other.label}")
    return notes


# === 扇检查 ===

@dataclass(frozen=True)
class FanCheck:
    ok: bool
    reason: str = ""
    pair: tuple = ()
    witness: tuple = ()

    def to_dict(self):
        return {"ok": self.ok, "reason": self.reason,
                "pair": [[list(g) for g in c.generators] for c in self.pair],
                "witness": [str(x) for x in self.witness]}


def fan_check(cones):
    """
    扇公理：不同锥的相对内部两两不交，且每个锥的面都在列表中 ({0} 视为隐含)。
    """
    cones = [c.closure() for c in cones]
    for i, j in combinations(range(len(cones)), 2):
        a, b = cones[i], cones[j]
        if same_cone(a, b):
            continue
        point = system_point(a.ambient_dim, a.equalities + b.equalities,
                             [(u, True) for u, _ in a.inequalities + b.inequalities])
        if point is not None and any(point):
            return FanCheck(False, "relative interiors intersect", (a, b), tuple(point))
    for cone in cones:
        for subset in cone.faces():
            if not subset:
                continue
            face = cone.face_cone(subset)
            if not any(same_cone(face, other) for other in cones):
                return FanCheck(False, "face of a listed cone is missing", (cone, face))
    return FanCheck(True)


def normal_fan(poly):
    return [sigma(poly, f, relatively_open=False) for f in poly.proper_faces()]


def duality_violations(poly):
    """ε ⊇ γ 当且仅当 σ̄(ε) 是 σ̄(γ) 的面"""
    bad = []
    faces = poly.proper_faces()
    closures = {f.id: sigma(poly, f, relatively_open=False) for f in faces}
    for gamma in faces:
        for eps in faces:
            contains = set(gamma.vertex_ids) <= set(eps.vertex_ids) and \
                set(gamma.recession) <= set(eps.recession)
            if contains != is_face_of(closures[eps.id], closures[gamma.id]):
                bad.append((gamma.label, eps.label))
    return bad


# === 消失引理的锥 ===

def vanishing_cone(size, blocks, weights):
    """
    R^I_{>0} 中由 sum_{i in K_j} a_i x_i <= sum_{i in I\\K} a_i x_i (j = 1..m) 定义的锥，
    blocks 为 K_1..K_m (两两不交、非空，并集为 I 的真子集)。
    """
    rest = _check_blocks(size, blocks)
    ineqs = [(tuple(int(i == j) for j in range(size)), True) for i in range(size)]
    for block in blocks:
        ineqs.append((_block_form(size, block, rest, weights), False))
    return RationalCone.from_inequalities(size, ineqs)


def vanishing_cells(size, blocks, weights):
    """Δ_J：j ∈ J 取严格不等式，其余取等式；返回 [(J, 锥)]"""
    rest = _check_blocks(size, blocks)
    positive = [(tuple(int(i == j) for j in range(size)), True) for i in range(size)]
    cells = []
    m = len(blocks)
    for k in range(m + 1):
        for J in combinations(range(m), k):
            ineqs = list(positive)
            eqs = []
            for j, block in enumerate(blocks):
                form = _block_form(size, block, rest, weights)
                if j in J:
                    ineqs.append((form, True))
                else:
                    eqs.append(form)
            cells.append((J, RationalCone.from_inequalities(size, ineqs, eqs)))
    return cells


def _check_blocks(size, blocks):
    used = [i for b in blocks for i in b]
    if size < 2 or not blocks or any(not b for b in blocks) or len(set(used)) != len(used) \
            or len(used) >= size or any(not 0 <= i < size for i in used):
        raise ValueError("blocks must be disjoint nonempty subsets of a proper subset of {1..|I|}")
    return [i for i in range(size) if i not in used]


def _block_form(size, block, rest, weights):
    form = [0] * size
    for i in rest:
        form[i] = int(weights[i])
    for i in block:
        form[i] = -int(weights[i])
    return tuple(form)
