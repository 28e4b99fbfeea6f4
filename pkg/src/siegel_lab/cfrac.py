"""Continued fractions, convergents and closest-return distances."""
from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass
from fractions import Fraction

from .errors import ConfigError, DepthExceeded, NotIrrationalAtPrecision

# quotients larger than this cannot be certified from a double
MAX_QUOTIENT = 10**9
# a prefix [a_1..a_K] is kept only while its cylinder is this many ulps wide
_CYLINDER_ULPS = 64


@dataclass(frozen=True)
class RotationNumber:
    """An irrational in (0, 1) with its certified continued-fraction prefix.

    ``partial_quotients`` holds a_1..a_K; ``p`` and ``q`` hold the
    convergent numerators/denominators for n = 0..K with q_0 = 1, q_1 = a_1.
    """

    partial_quotients: tuple[int, ...]
    value: float

    def __post_init__(self):
        if len(self.partial_quotients) < 2:
            raise NotIrrationalAtPrecision("need at least two partial quotients")
        if any(int(a) < 1 for a in self.partial_quotients):
            raise ValueError("partial quotients must be positive integers")
        if not 0.0 < self.value < 1.0:
            raise ValueError("rotation number must lie in (0, 1)")
        p, q = _convergents(self.partial_quotients)
        object.__setattr__(self, "_p", tuple(p))
        object.__setattr__(self, "_q", tuple(q))

    @property
    def depth(self) -> int:
        return len(self.partial_quotients)

    @property
    def bound(self) -> int:
        return max(self.partial_quotients)

    @property
    def p(self) -> tuple[int, ...]:
        return self._p

    @property
    def q(self) -> tuple[int, ...]:
        return self._q

    def closest_return(self, n: int) -> float:
        """<q_n theta> = |q_n theta - p_n|, exact with respect to ``value``."""
        if not 0 <= n <= self.depth:
            raise DepthExceeded(f"n={n} outside stored depth {self.depth}")
        return float(abs(self._q[n] * Fraction(self.value) - self._p[n]))

    def tau_bound(self) -> int:
        """A computable tau with q_n < tau * q_{n-2} for every n >= 2."""
        return (self.bound + 1) ** 2

    @classmethod
    def from_quotients(cls, quotients, periodic: bool = False) -> "RotationNumber":
        """Build from leading quotients.

        With ``periodic`` the list repeats forever; otherwise the tail is
        continued with 1's so the number stays irrational of the same type.
        """
        quotients = [int(a) for a in quotients]
        if not quotients or any(a < 1 for a in quotients):
            raise ValueError("quotients must be a non-empty list of positive integers")
        tail = quotients if periodic else [1]
        seq = list(quotients)
        while _convergents(seq)[1][-1] < 10**40:
            seq.extend(tail)
        value = float(_evaluate(seq))
        rot = continued_fraction_expand(value, depth=len(seq))
        keep = rot.depth
        if list(rot.partial_quotients) != seq[:keep]:
            raise NotIrrationalAtPrecision("quotients not representable at double precision")
        return cls(tuple(seq[:keep]), value)


def _convergents(quotients):
    p = [0, 1]  # p_0, p_1 = 0, 1 for theta in (0,1)
    q = [1, quotients[0]]
    for a in quotients[1:]:
        p.append(a * p[-1] + p[-2])
        q.append(a * q[-1] + q[-2])
    return p, q


def _evaluate(quotients) -> Fraction:
    x = Fraction(0)
    for a in reversed(quotients):
        x = 1 / (a + x)
    return x


def continued_fraction_expand(x: float, depth: int) -> RotationNumber:
    """Gauss-map expansion of ``x`` in exact rational arithmetic on the double.

    Stops silently at the precision limit; raises NotIrrationalAtPrecision
    when the expansion terminates (or a quotient exceeds 1e9) before that.
    """
    x = float(x)
    if not 0.0 < x < 1.0:
        raise NotIrrationalAtPrecision(f"{x!r} is not in (0, 1)")
    ulp = math.ulp(x)
    r = Fraction(x)
    quotients: list[int] = []
    q_prev, q_cur = 0, 1
    while len(quotients) < depth:
        if r == 0:
            raise NotIrrationalAtPrecision(f"{x!r} has a terminating expansion")
        y = 1 / r
        a = math.floor(y)
        if a > MAX_QUOTIENT:
            raise NotIrrationalAtPrecision(f"quotient {a} exceeds {MAX_QUOTIENT}")
        q_next = a * q_cur + q_prev
        # width of the cylinder set of [a_1..a_K]
        width = 1.0 / (q_next * (q_next + q_cur))
        if width < _CYLINDER_ULPS * ulp:
            break
        quotients.append(a)
        q_prev, q_cur = q_cur, q_next
        r = y - a
    if len(quotients) < 2:
        raise NotIrrationalAtPrecision(f"{x!r} cannot be certified beyond {len(quotients)} quotient(s)")
    return RotationNumber(tuple(quotients), x)


def convergents_and_returns(rot: RotationNumber, n_max: int) -> list[tuple[int, int, int, float]]:
    """Rows (n, p_n, q_n, <q_n theta>) for n = 0..n_max."""
    if n_max < 0 or n_max > rot.depth - 1:
        raise DepthExceeded(f"n_max={n_max} needs quotients up to a_{n_max + 1}; depth is {rot.depth}")
    return [(n, rot.p[n], rot.q[n], rot.closest_return(n)) for n in range(n_max + 1)]


def is_bounded_type(rot: RotationNumber, bound: int) -> tuple[bool, int | None]:
    """True iff every stored quotient is <= bound; else the first 1-based index above it."""
    for i, a in enumerate(rot.partial_quotients, start=1):
        if a > bound:
            return False, i
    return True, None


GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
SILVER = math.sqrt(2.0) - 1.0

_NAMED = {
    "golden": ([1], True),
    "silver": ([2], True),
}

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_FUNCS = {"sqrt": math.sqrt, "exp": math.exp, "log": math.log, "cos": math.cos, "sin": math.sin}
_CONSTS = {"pi": math.pi, "e": math.e, "golden": GOLDEN, "silver": SILVER}


def _eval_expr(node):
    if isinstance(node, ast.Expression):
        return _eval_expr(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return float(node.value)
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_expr(node.left), _eval_expr(node.right))
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval_expr(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS:
        return _FUNCS[node.func.id](*[_eval_expr(a) for a in node.args])
    if isinstance(node, ast.Name) and node.id in _CONSTS:
        return _CONSTS[node.id]
    raise ConfigError(f"unsupported theta expression element: {ast.dump(node)}")


def parse_theta(spec, depth: int = 64) -> RotationNumber:
    """Parse a theta specification.

    Accepted: a name (``golden``, ``silver``), ``cf:1,2,3`` (leading quotients,
    tail of 1's), ``periodic:1,2`` (repeating block), a list of ints, a number,
    or an arithmetic expression such as ``sqrt(2)-1``.
    """
    if isinstance(spec, RotationNumber):
        return spec
    if isinstance(spec, dict):
        if "quotients" in spec:
            return RotationNumber.from_quotients(spec["quotients"], periodic=bool(spec.get("periodic", False)))
        if "value" in spec:
            return parse_theta(spec["value"], depth)
        raise ConfigError("theta mapping needs 'quotients' or 'value'")
    if isinstance(spec, (list, tuple)):
        return RotationNumber.from_quotients(spec)
    if isinstance(spec, (int, float)):
        return continued_fraction_expand(float(spec), depth)
    text = str(spec).strip()
    if text in _NAMED:
        block, periodic = _NAMED[text]
        return RotationNumber.from_quotients(block, periodic=periodic)
    for prefix, periodic in (("cf:", False), ("periodic:", True)):
        if text.startswith(prefix):
            try:
                block = [int(s) for s in text[len(prefix):].split(",") if s.strip()]
            except ValueError as exc:
                raise ConfigError(f"bad quotient list in {text!r}") from exc
            return RotationNumber.from_quotients(block, periodic=periodic)
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"cannot parse theta {text!r}") from exc
    return continued_fraction_expand(_eval_expr(tree), depth)
