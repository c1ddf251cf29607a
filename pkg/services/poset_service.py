"""
Inclusion-exclusion inversion on finite quasi-lattices

A quasi-lattice is given by its join table; a missing pair means the two
elements have no common upper bound.
"""

from dataclasses import dataclass
from itertools import combinations
from typing import Dict, Hashable, Iterable, Mapping, Optional, Sequence, Tuple

from services.monoid_service import INFINITY, MonoidElement, join
from utils.errors import InconsistentJoinTableError, InvalidInputError
from utils.logger import get_logger

logger = get_logger(__name__)

MAX_UPPER_SET = 20


@dataclass(frozen=True)
class JoinTable:
    """Explicit join table of a finite quasi-lattice"""

    elements: Tuple[Hashable, ...]
    joins: Tuple[Tuple[Optional[Hashable], ...], ...]

    @classmethod
    def from_mapping(cls, elements: Sequence[Hashable],
                     table: Mapping[Tuple[Hashable, Hashable], Optional[Hashable]]) -> "JoinTable":
        """Build from pairs; (a, b) may be given in either order, a missing pair means no join"""
        elements = tuple(elements)
        if len(set(elements)) != len(elements):
            raise InconsistentJoinTableError("Duplicate elements in join table")
        known = set(elements)
        rows = []
        for a in elements:
            row = []
            for b in elements:
                if a == b:
                    value = table.get((a, a), a)
                elif (a, b) in table and (b, a) in table and table[(a, b)] != table[(b, a)]:
                    raise InconsistentJoinTableError(f"join({a}, {b}) is not symmetric")
                else:
                    value = table.get((a, b), table.get((b, a)))
                if value is not None and value not in known:
                    raise InconsistentJoinTableError(f"join({a}, {b}) = {value} is not an element")
                row.append(value)
            rows.append(tuple(row))
        joined = cls(elements, tuple(rows))
        joined.validate()
        return joined

    def _index(self, a: Hashable) -> int:
        try:
            return self.elements.index(a)
        except ValueError:
            raise InvalidInputError(f"{a!r} is not in the join table")

    def join(self, a: Hashable, b: Hashable) -> Optional[Hashable]:
        return self.joins[self._index(a)][self._index(b)]

    def leq(self, a: Hashable, b: Hashable) -> bool:
        return self.join(a, b) == b

    def validate(self) -> None:
        """Raise InconsistentJoinTableError unless the table is a join on a partial order"""
        items = self.elements
        for a in items:
            if self.join(a, a) != a:
                raise InconsistentJoinTableError(f"join({a}, {a}) must be {a}")
        for a, b in combinations(items, 2):
            if self.leq(a, b) and self.leq(b, a):
                raise InconsistentJoinTableError(f"{a} and {b} are mutually below each other")
        for a in items:
            for b in items:
                for c in items:
                    if self.leq(a, b) and self.leq(b, c) and not self.leq(a, c):
                        raise InconsistentJoinTableError(f"order is not transitive at {a} <= {b} <= {c}")
        for a, b in combinations(items, 2):
            upper = [r for r in items if self.leq(a, r) and self.leq(b, r)]
            value = self.join(a, b)
            if value is None:
                if upper:
                    raise InconsistentJoinTableError(f"{a} and {b} have upper bound {upper[0]} but no join")
                continue
            if value not in upper:
                raise InconsistentJoinTableError(f"join({a}, {b}) = {value} is not an upper bound")
            if not all(self.leq(value, r) for r in upper):
                raise InconsistentJoinTableError(f"join({a}, {b}) = {value} is not the least upper bound")

    def join_of(self, family: Iterable[Hashable]) -> Optional[Hashable]:
        result = None
        for position, item in enumerate(family):
            result = item if position == 0 else self.join(result, item)
            if result is None:
                return None
        return result


def join_table_from_elements(elements: Sequence[MonoidElement]) -> JoinTable:
    """Join table of a join-closed family of monoid elements"""
    labels = [str(p) for p in elements]
    table = {}
    for (i, p), (j, q) in combinations(enumerate(elements), 2):
        upper = join(p, q)
        if upper is INFINITY:
            continue
        if upper not in elements:
            raise InconsistentJoinTableError(f"join({p}, {q}) = {upper} is outside the family")
        table[(labels[i], labels[j])] = str(upper)
    return JoinTable.from_mapping(labels, table)


@dataclass
class MobiusResult:
    fhat: Dict[Hashable, float]
    residual: float


def mobius_invert(poset: JoinTable, f: Mapping[Hashable, float]) -> MobiusResult:
    """
    f_hat(p) = f(p) + sum over nonempty K of {q > p} of (-1)^|K| f(q_K)

    with f(infinity) = 0, and the residual of f(p) = sum_{q >= p} f_hat(q).
    """
    missing = [p for p in poset.elements if p not in f]
    if missing:
        raise InvalidInputError(f"f is missing values for {missing}")

    fhat: Dict[Hashable, float] = {}
    for p in poset.elements:
        above = [q for q in poset.elements if q != p and poset.leq(p, q)]
        if len(above) > MAX_UPPER_SET:
            raise InvalidInputError(f"{len(above)} elements above {p} exceed the limit of {MAX_UPPER_SET}")
        value = float(f[p])
        for size in range(1, len(above) + 1):
            for K in combinations(above, size):
                upper = poset.join_of(K)
                if upper is not None:
                    value += (-1) ** size * float(f[upper])
        fhat[p] = value

    residual = max(
        abs(sum(fhat[q] for q in poset.elements if poset.leq(p, q)) - float(f[p]))
        for p in poset.elements
    )
    logger.debug("Mobius inversion residual %.3e", residual)
    return MobiusResult(fhat, residual)
