"""Finite groups with dense 0-based element indices, measures, and characters.

Element 0 is always the identity, and the element ordering fixed at
construction is reused by every matrix indexed by the group (regular
representations, correlation matrices, channel bases).  Objects built from
different orderings of the same abstract group are not interchangeable.
"""

from __future__ import annotations

import itertools
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import (
    EmptyGeneratorSet,
    NoIdentity,
    NoInverse,
    NonAbelianGroup,
    NonAssociativeTable,
    NotASubgroup,
    NumericalFailure,
    UnsupportedDescriptor,
    ValidationError,
)

MEASURE_ATOL = 1e-12
MEASURE_RENORM_ATOL = 1e-9
EXPLICIT_TABLE_CAP = 64
SYMMETRIC_CAP = 5

# S3 element ordering: identity, the two 3-cycles, then the transpositions
# (12), (23), (13).  This is the rotation/reflection enumeration of the
# triangle symmetries (t*c^k with c=(123), t=(12)) and makes the standard
# 2-dimensional irreducible matrices come out in their usual display form.
_S3_ORDER = [(0, 1, 2), (1, 2, 0), (2, 0, 1), (1, 0, 2), (0, 2, 1), (2, 1, 0)]


def _validate_table(table: np.ndarray) -> None:
    n = table.shape[0]
    idx = np.arange(n)
    if not (np.array_equal(table[0], idx) and np.array_equal(table[:, 0], idx)):
        raise NoIdentity("element 0 must be a two-sided identity")
    for s in range(n):
        row_hits = np.flatnonzero(table[s] == 0)
        if row_hits.size != 1 or table[row_hits[0], s] != 0:
            raise NoInverse(f"element {s} has no two-sided inverse")
    # table[table[s,t], u] == table[s, table[t,u]] for all triples
    if not np.array_equal(table[table], table[:, table]):
        raise NonAssociativeTable("multiplication table is not associative")


def _inverse_vector(table: np.ndarray) -> np.ndarray:
    inv = np.argmax(table == 0, axis=1)
    inv.setflags(write=False)
    return inv


class FiniteGroup:
    """A finite group given by its multiplication table, table[s, t] = s*t."""

    def __init__(self, table, labels=None, name=None, *, kind=None,
                 cyclic_factors=None, validate=True):
        table = np.array(table, dtype=np.intp)
        if table.ndim != 2 or table.shape[0] != table.shape[1]:
            raise ValidationError("multiplication table must be square")
        n = int(table.shape[0])
        if n == 0:
            raise ValidationError("group must be nonempty")
        if table.min() < 0 or table.max() >= n:
            raise ValidationError("table entries must be element indices")
        if validate:
            _validate_table(table)
        table.setflags(write=False)
        self.order = n
        self.table = table
        self.identity = 0
        self.inverse = _inverse_vector(table)
        if labels is not None:
            if len(labels) != n:
                raise ValidationError("labels length does not match order")
            self.labels = [str(x) for x in labels]
        else:
            self.labels = [f"g{k}" for k in range(n)]
        self.name = name or f"G{n}"
        self.kind = kind
        self._cyclic_factors = list(cyclic_factors) if cyclic_factors else None
        self._perms: list[tuple[int, ...]] | None = None

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return int(self.inverse[a])

    def power(self, s: int, k: int) -> int:
        if k < 0:
            return self.power(self.inv(s), -k)
        out = 0
        for _ in range(k):
            out = self.mul(out, s)
        return out

    def element_order(self, s: int) -> int:
        out, k = s, 1
        while out != 0:
            out = self.mul(out, s)
            k += 1
        return k

    def elements(self) -> range:
        return range(self.order)

    @cached_property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def same_table(self, other: "FiniteGroup") -> bool:
        return self.order == other.order and np.array_equal(self.table, other.table)

    def __repr__(self) -> str:
        return f"<FiniteGroup {self.name} order={self.order}>"


def cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise UnsupportedDescriptor("cyclic order must be positive")
    idx = np.arange(n)
    table = (idx[:, None] + idx[None, :]) % n
    return FiniteGroup(table, labels=[str(k) for k in range(n)], name=f"Z{n}",
                       kind=("cyclic", n), cyclic_factors=[n], validate=False)


def product(g: FiniteGroup, h: FiniteGroup) -> FiniteGroup:
    n, m = g.order, h.order
    a_idx, b_idx = np.divmod(np.arange(n * m), m)
    table = g.table[np.ix_(a_idx, a_idx)] * m + h.table[np.ix_(b_idx, b_idx)]
    labels = [f"({g.labels[a]},{h.labels[b]})" for a, b in zip(a_idx, b_idx)]
    factors = None
    if g._cyclic_factors and h._cyclic_factors:
        factors = g._cyclic_factors + h._cyclic_factors
    return FiniteGroup(table, labels=labels, name=f"{g.name}x{h.name}",
                       kind=("product", g.kind, h.kind),
                       cyclic_factors=factors, validate=False)


def _swap_action(normal: FiniteGroup) -> list[list[int]]:
    factors = normal._cyclic_factors
    if not factors or len(factors) != 2 or factors[0] != factors[1]:
        raise UnsupportedDescriptor(
            "swap action needs a product of two equal cyclic factors")
    m = factors[1]
    swap = [(x % m) * m + (x // m) for x in range(normal.order)]
    return [list(range(normal.order)), swap]


def semidirect(normal: FiniteGroup, acting: FiniteGroup,
               action) -> FiniteGroup:
    """Semidirect product with multiplication (n1,h1)(n2,h2) = (a_{h2}(n1) n2, h1 h2).

    ``action`` maps each element of the acting group to an automorphism of the
    normal factor, given as a permutation list, a callable (h, n) -> n, or the
    string "swap" (coordinate swap on a product of two equal cyclic factors).
    The map h -> a_h must be an anti-homomorphism for this convention; for an
    abelian acting group the two orientations coincide.
    """
    if action == "swap":
        perms = _swap_action(normal)
    elif callable(action):
        perms = [[int(action(h, x)) for x in normal.elements()]
                 for h in acting.elements()]
    else:
        perms = [list(map(int, row)) for row in action]
    if len(perms) != acting.order:
        raise UnsupportedDescriptor("action must give one permutation per acting element")
    for h, perm in enumerate(perms):
        if sorted(perm) != list(range(normal.order)):
            raise UnsupportedDescriptor(f"action of element {h} is not a permutation")
        for x in normal.elements():
            for y in normal.elements():
                if perm[normal.mul(x, y)] != normal.mul(perm[x], perm[y]):
                    raise UnsupportedDescriptor(
                        f"action of element {h} is not an automorphism")
    for h1 in acting.elements():
        for h2 in acting.elements():
            composed = [perms[h1][perms[h2][x]] for x in normal.elements()]
            if composed != perms[acting.mul(h2, h1)]:
                raise UnsupportedDescriptor("action is not compatible with the acting group")
    nn, nh = normal.order, acting.order
    order = nn * nh
    table = np.empty((order, order), dtype=np.intp)
    for n1 in normal.elements():
        for h1 in acting.elements():
            a = n1 * nh + h1
            for n2 in normal.elements():
                for h2 in acting.elements():
                    b = n2 * nh + h2
                    table[a, b] = normal.mul(perms[h2][n1], n2) * nh + acting.mul(h1, h2)
    labels = [f"({normal.labels[x // nh]};{acting.labels[x % nh]})"
              for x in range(order)]
    return FiniteGroup(table, labels=labels,
                       name=f"{normal.name}:{acting.name}",
                       kind=("semidirect", normal.kind, acting.kind))


def dihedral(n: int) -> FiniteGroup:
    """Dihedral group of order 2n, elements s^e r^a indexed as e*n + a."""
    if n < 1:
        raise UnsupportedDescriptor("dihedral parameter must be positive")
    order = 2 * n
    table = np.empty((order, order), dtype=np.intp)
    for e1 in (0, 1):
        for a1 in range(n):
            i = e1 * n + a1
            for e2 in (0, 1):
                for a2 in range(n):
                    j = e2 * n + a2
                    sign = -1 if e2 else 1
                    table[i, j] = ((e1 + e2) % 2) * n + (sign * a1 + a2) % n
    labels = []
    for e in (0, 1):
        for a in range(n):
            if e == 0:
                labels.append("e" if a == 0 else f"r{a}")
            else:
                labels.append("s" if a == 0 else f"sr{a}")
    return FiniteGroup(table, labels=labels, name=f"D{n}",
                       kind=("dihedral", n), validate=False)


def _perm_label(perm: tuple[int, ...]) -> str:
    seen = [False] * len(perm)
    cycles = []
    for start in range(len(perm)):
        if seen[start] or perm[start] == start:
            seen[start] = True
            continue
        cycle = [start]
        seen[start] = True
        nxt = perm[start]
        while nxt != start:
            cycle.append(nxt)
            seen[nxt] = True
            nxt = perm[nxt]
        cycles.append("(" + "".join(str(x + 1) for x in cycle) + ")")
    return "".join(cycles) if cycles else "e"


def symmetric(n: int) -> FiniteGroup:
    """Symmetric group on n letters, composing right to left."""
    if n < 1 or n > SYMMETRIC_CAP:
        raise UnsupportedDescriptor(f"symmetric(n) supports 1 <= n <= {SYMMETRIC_CAP}")
    if n == 3:
        perms = list(_S3_ORDER)
    else:
        perms = sorted(itertools.permutations(range(n)))
    index = {p: k for k, p in enumerate(perms)}
    order = len(perms)
    table = np.empty((order, order), dtype=np.intp)
    for i, sigma in enumerate(perms):
        for j, tau in enumerate(perms):
            table[i, j] = index[tuple(sigma[tau[k]] for k in range(n))]
    group = FiniteGroup(table, labels=[_perm_label(p) for p in perms],
                        name=f"S{n}", kind=("symmetric", n), validate=False)
    group._perms = perms
    return group


def explicit(table, labels=None, name=None) -> FiniteGroup:
    table = np.asarray(table)
    if table.shape[0] > EXPLICIT_TABLE_CAP:
        raise UnsupportedDescriptor(f"explicit tables capped at order {EXPLICIT_TABLE_CAP}")
    return FiniteGroup(table, labels=labels, name=name or "explicit",
                       kind=("explicit",), validate=True)


_ALIASES: dict[str, Callable[[], FiniteGroup]] = {
    "s3": lambda: symmetric(3),
    "s4": lambda: symmetric(4),
    "s5": lambda: symmetric(5),
    "d4-semidirect": lambda: semidirect(product(cyclic(2), cyclic(2)), cyclic(2), "swap"),
}


def make_group(spec) -> FiniteGroup:
    """Build a group from an alias string, a descriptor dict, or a table dict.

    Aliases: ``z{n}``, ``z2^{k}``, ``z{a}xz{b}...``, ``s3``..``s5``, ``d{n}``,
    ``d4-semidirect``.
    """
    if isinstance(spec, FiniteGroup):
        return spec
    if isinstance(spec, str):
        key = spec.strip().lower()
        if key in _ALIASES:
            return _ALIASES[key]()
        if key.startswith("z") and "^" in key:
            base, _, exp = key.partition("^")
            if base[1:].isdigit() and exp.isdigit():
                n, k = int(base[1:]), int(exp)
                if n >= 1 and k >= 1:
                    group = cyclic(n)
                    for _ in range(k - 1):
                        group = product(group, cyclic(n))
                    return group
        if "x" in key:
            parts = key.split("x")
            if all(p.startswith("z") and p[1:].isdigit() for p in parts):
                group = cyclic(int(parts[0][1:]))
                for part in parts[1:]:
                    group = product(group, cyclic(int(part[1:])))
                return group
        if key.startswith("z") and key[1:].isdigit():
            return cyclic(int(key[1:]))
        if key.startswith("d") and key[1:].isdigit():
            return dihedral(int(key[1:]))
        raise UnsupportedDescriptor(f"unknown group alias {spec!r}")
    if isinstance(spec, dict):
        if "table" in spec:
            return explicit(spec["table"], labels=spec.get("labels"),
                            name=spec.get("name"))
        kind = spec.get("kind")
        if kind == "cyclic":
            return cyclic(int(spec["n"]))
        if kind == "dihedral":
            return dihedral(int(spec["n"]))
        if kind == "symmetric":
            return symmetric(int(spec["n"]))
        if kind == "product":
            factors = [make_group(f) for f in spec["factors"]]
            group = factors[0]
            for f in factors[1:]:
                group = product(group, f)
            return group
        if kind == "semidirect":
            return semidirect(make_group(spec["normal"]),
                              make_group(spec["acting"]), spec["action"])
        raise UnsupportedDescriptor(f"unknown descriptor kind {kind!r}")
    raise UnsupportedDescriptor(f"cannot build a group from {type(spec).__name__}")


def subgroup_generated(group: FiniteGroup, generators: Iterable[int]) -> list[int]:
    gens = sorted({int(s) for s in generators})
    if not gens:
        raise EmptyGeneratorSet("need at least one generator")
    for s in gens:
        if not 0 <= s < group.order:
            raise ValidationError(f"generator {s} out of range")
    closure = {0}
    frontier = set(gens) | {group.inv(s) for s in gens}
    closure |= frontier
    while frontier:
        new = set()
        for s in frontier:
            for t in closure:
                for u in (group.mul(s, t), group.mul(t, s)):
                    if u not in closure:
                        new.add(u)
        closure |= new
        frontier = new
    return sorted(closure)


def is_subgroup(group: FiniteGroup, elements: Iterable[int]) -> bool:
    elems = {int(s) for s in elements}
    if 0 not in elems:
        return False
    for s in elems:
        if group.inv(s) not in elems:
            return False
        for t in elems:
            if group.mul(s, t) not in elems:
                return False
    return True


def left_cosets(group: FiniteGroup, subgroup: Iterable[int]) -> list[list[int]]:
    sub = sorted({int(s) for s in subgroup})
    if not is_subgroup(group, sub):
        raise NotASubgroup("the given element set is not a subgroup")
    cosets: list[list[int]] = []
    seen = [False] * group.order
    for s in group.elements():
        if seen[s]:
            continue
        coset = sorted(group.mul(s, h) for h in sub)
        for u in coset:
            seen[u] = True
        cosets.append(coset)
    return cosets


def quotient_group(group: FiniteGroup, subgroup: Sequence[int]):
    """Quotient of an abelian group by a subgroup; returns (quotient, coset_index)."""
    if not group.is_abelian:
        raise NonAbelianGroup("quotients are only built for abelian groups here")
    cosets = left_cosets(group, subgroup)
    coset_of = np.empty(group.order, dtype=np.intp)
    for qi, coset in enumerate(cosets):
        for u in coset:
            coset_of[u] = qi
    reps = [coset[0] for coset in cosets]
    k = len(cosets)
    table = np.empty((k, k), dtype=np.intp)
    for i, a in enumerate(reps):
        for j, b in enumerate(reps):
            table[i, j] = coset_of[group.mul(a, b)]
    quotient = FiniteGroup(table, name=f"{group.name}/H", validate=True)
    return quotient, coset_of


class ProbabilityMeasure:
    """Nonnegative weights over group elements summing to one."""

    def __init__(self, group: FiniteGroup, weights):
        weights = np.array(weights, dtype=float)
        if weights.shape != (group.order,):
            raise ValidationError("weights length must equal the group order")
        if weights.min() < -MEASURE_ATOL:
            raise ValidationError("weights must be nonnegative")
        weights = np.clip(weights, 0.0, None)
        total = float(weights.sum())
        if abs(total - 1.0) > MEASURE_RENORM_ATOL:
            raise ValidationError(f"weights sum to {total}, not 1")
        if abs(total - 1.0) > MEASURE_ATOL:
            weights = weights / total
        weights.setflags(write=False)
        self.group = group
        self.weights = weights

    def __getitem__(self, s: int) -> float:
        return float(self.weights[s])

    def support(self, tol: float = 0.0) -> list[int]:
        return [int(s) for s in np.flatnonzero(self.weights > tol)]

    def reflect(self) -> "ProbabilityMeasure":
        """Pushforward under inversion, s -> s^{-1}."""
        return ProbabilityMeasure(self.group, self.weights[self.group.inverse])

    def __repr__(self) -> str:
        return f"<ProbabilityMeasure on {self.group.name}>"


def point_mass(group: FiniteGroup, s: int) -> ProbabilityMeasure:
    w = np.zeros(group.order)
    w[s] = 1.0
    return ProbabilityMeasure(group, w)


def haar(group: FiniteGroup) -> ProbabilityMeasure:
    return ProbabilityMeasure(group, np.full(group.order, 1.0 / group.order))


def uniform_on(group: FiniteGroup, elements: Iterable[int]) -> ProbabilityMeasure:
    elems = sorted({int(s) for s in elements})
    if not elems:
        raise EmptyGeneratorSet("need at least one element")
    w = np.zeros(group.order)
    w[elems] = 1.0 / len(elems)
    return ProbabilityMeasure(group, w)


def convolve(mu: ProbabilityMeasure, nu: ProbabilityMeasure,
             group: FiniteGroup | None = None) -> ProbabilityMeasure:
    """Convolution (mu * nu)(u) = sum over st = u of mu(s) nu(t)."""
    group = group or mu.group
    if not (mu.group.same_table(group) and nu.group.same_table(group)):
        raise ValidationError("measures must live on the same group")
    out = np.zeros(group.order)
    for s in group.elements():
        if mu.weights[s] > 0.0:
            np.add.at(out, group.table[s], mu.weights[s] * nu.weights)
    return ProbabilityMeasure(group, out)


def is_adapted(mu: ProbabilityMeasure) -> bool:
    """True when the support of mu generates the whole group."""
    supp = mu.support()
    if not supp:
        return False
    return len(subgroup_generated(mu.group, supp)) == mu.group.order


class Character:
    """Group homomorphism into the unit circle, stored as a value vector."""

    def __init__(self, group: FiniteGroup, values, validate=True):
        values = np.asarray(values, dtype=complex)
        if values.shape != (group.order,):
            raise ValidationError("character length must equal the group order")
        if validate:
            if abs(values[0] - 1.0) > 1e-12:
                raise ValidationError("character must be 1 at the identity")
            if np.max(np.abs(np.abs(values) - 1.0)) > 1e-10:
                raise ValidationError("character values must have modulus 1")
            prod = values[:, None] * values[None, :]
            if np.max(np.abs(values[group.table] - prod)) > 1e-10:
                raise ValidationError("values are not multiplicative")
        values.setflags(write=False)
        self.group = group
        self.values = values

    def __getitem__(self, s: int) -> complex:
        return complex(self.values[s])

    def __mul__(self, other: "Character") -> "Character":
        return Character(self.group, self.values * other.values, validate=False)

    def conjugate(self) -> "Character":
        return Character(self.group, self.values.conj(), validate=False)


def _derive_cyclic_factors(group: FiniteGroup) -> list[tuple[int, int]]:
    """Generators and orders of a direct-factor decomposition (abelian only)."""
    if group.order == 1:
        return []
    orders = np.array([group.element_order(s) for s in group.elements()])
    g1 = int(np.argmax(orders))
    n1 = int(orders[g1])
    powers = [group.power(g1, k) for k in range(n1)]
    quotient, coset_of = quotient_group(group, powers)
    rest = _derive_cyclic_factors(quotient)
    factors = [(g1, n1)]
    for qgen, m in rest:
        # lift a quotient generator to a group element of the same order
        coset = [int(s) for s in np.flatnonzero(coset_of == qgen)]
        lifted = None
        for u in coset:
            if group.power(u, m) == 0:
                lifted = u
                break
        if lifted is None:
            raise NumericalFailure("cyclic factor lift failed")
        factors.append((lifted, m))
    return factors


def cyclic_factorization(group: FiniteGroup):
    """Orders and exponent coordinates of a cyclic direct-factor decomposition.

    Returns (orders, exponents) where exponents[t] holds the mixed-radix
    coordinates of element t with respect to the decomposition.  Groups built
    as (products of) cyclic groups keep their construction ordering; other
    abelian groups get a derived decomposition with factor orders descending.
    """
    if not group.is_abelian:
        raise NonAbelianGroup("cyclic factorization needs an abelian group")
    n = group.order
    if group._cyclic_factors:
        orders = list(group._cyclic_factors)
        strides = np.ones(len(orders), dtype=np.intp)
        for i in range(len(orders) - 2, -1, -1):
            strides[i] = strides[i + 1] * orders[i + 1]
        generators = [int(s) for s in strides]
    else:
        pairs = _derive_cyclic_factors(group)
        generators = [g for g, _ in pairs]
        orders = [m for _, m in pairs]
    exponents = np.full((n, len(orders)), -1, dtype=np.intp)
    if not orders:
        exponents = np.zeros((n, 0), dtype=np.intp)
        return [], exponents
    for digits in itertools.product(*[range(m) for m in orders]):
        t = 0
        for g, a in zip(generators, digits):
            t = group.mul(t, group.power(g, a))
        if exponents[t, 0] != -1:
            raise NumericalFailure("derived decomposition is not direct")
        exponents[t] = digits
    return orders, exponents


def characters(group: FiniteGroup) -> list[Character]:
    """All characters of an abelian group, ordered lexicographically in the
    exponent coordinates of its cyclic factorization."""
    if not group.is_abelian:
        raise NonAbelianGroup("characters are only enumerated for abelian groups")
    orders, exponents = cyclic_factorization(group)
    n = group.order
    if not orders:
        return [Character(group, np.ones(1, dtype=complex), validate=False)]
    inv_orders = np.array([1.0 / m for m in orders])
    chars = []
    for digits in itertools.product(*[range(m) for m in orders]):
        phases = exponents @ (np.array(digits) * inv_orders)
        chars.append(Character(group, np.exp(2j * np.pi * phases), validate=False))
    assert len(chars) == n
    return chars


def dual_group(group: FiniteGroup) -> FiniteGroup:
    """Character group of an abelian group, indexed to match characters()."""
    orders, _ = cyclic_factorization(group)
    if not orders:
        return cyclic(1)
    dual = cyclic(orders[0])
    for m in orders[1:]:
        dual = product(dual, cyclic(m))
    dual.name = f"dual({group.name})"
    return dual
