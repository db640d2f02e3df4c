"""Exactly evaluable approximating functions and their transforms.

Functions are described by a compact text spec, e.g. ``"power:1,2;round:5"``
(c·n^-s with c=1, s=2, then rounded down to a power of 5). Grammar::

    spec       := family (";" transform)*
    family     := "power:" c "," s | "log:" c | "zero-one:" p
                | "indicator:" c "," predicate | "table:" path | "zero"
    transform  := "scale:" c | "round:" p | "restrict:" predicate | "cap"
    predicate  := "squarefree" | "divisible:" p | "coprime:" p | "pfree:" p "," N
                | "le:" N

Constants are integers or fractions "a/b". The log family uses the exact
surrogate ⌊log2 n⌋ + 1 in place of log n.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Mapping

from .ntheory import is_prime, is_squarefree


class PsiSpecError(ValueError):
    pass


def log2_surrogate(n: int) -> int:
    return n.bit_length()  # ⌊log2 n⌋ + 1


@dataclass(frozen=True)
class Predicate:
    name: str
    args: tuple[int, ...] = ()

    def __call__(self, n: int) -> bool:
        if self.name == "squarefree":
            return is_squarefree(n)
        if self.name == "divisible":
            return n % self.args[0] == 0
        if self.name == "coprime":
            return n % self.args[0] != 0
        if self.name == "pfree":
            p, N = self.args
            return n % p ** (N + 1) != 0
        if self.name == "le":
            return n <= self.args[0]
        raise PsiSpecError(f"unknown predicate {self.name!r}")

    def render(self) -> str:
        return ":".join([self.name, ",".join(map(str, self.args))]) if self.args else self.name


@dataclass(frozen=True)
class Transform:
    kind: str  # scale | round | restrict | cap
    value: Fraction | int | Predicate | None = None

    def apply(self, n: int, v: Fraction) -> Fraction:
        if self.kind == "scale":
            return v * self.value
        if self.kind == "round":
            return round_down_p_power(v, self.value)
        if self.kind == "restrict":
            return v if self.value(n) else Fraction(0)
        if self.kind == "cap":
            # keep only the range where arcs of A_n(2ψ) stay disjoint
            return v if v < Fraction(1, 4 * n) else Fraction(0)
        raise PsiSpecError(f"unknown transform {self.kind!r}")

    def render(self) -> str:
        if self.kind == "cap":
            return "cap"
        if self.kind == "restrict":
            return f"restrict:{self.value.render()}"
        return f"{self.kind}:{self.value}"


def round_down_p_power(v, p: int) -> Fraction:
    """Largest element of {0, 1, 1/p, 1/p², ...} not exceeding v (values > 1 give 1)."""
    v = Fraction(v)
    if v <= 0:
        return Fraction(0)
    if v >= 1:
        return Fraction(1)
    q = 1
    while Fraction(1, q) > v:
        q *= p
    return Fraction(1, q)


@dataclass(frozen=True)
class PsiFunction:
    family: str
    params: tuple = ()
    transforms: tuple[Transform, ...] = ()
    table: Mapping[int, Fraction] = field(default_factory=dict, compare=False, hash=False)

    def base(self, n: int) -> Fraction:
        f = self.family
        if f == "power":
            c, s = self.params
            return Fraction(c) / n**s
        if f == "log":
            (c,) = self.params
            return Fraction(c) / (n * n * log2_surrogate(n))
        if f == "indicator":
            c, pred = self.params
            return Fraction(c) if pred(n) else Fraction(0)
        if f == "table":
            return self.table.get(n, Fraction(0))
        if f == "zero":
            return Fraction(0)
        raise PsiSpecError(f"unknown family {f!r}")

    def __call__(self, n: int) -> Fraction:
        if n < 1:
            raise ValueError(f"psi is defined on n >= 1, got {n}")
        v = self.base(n)
        for t in self.transforms:
            v = t.apply(n, v)
        return v

    def then(self, *transforms: Transform) -> "PsiFunction":
        return PsiFunction(self.family, self.params, self.transforms + transforms, self.table)

    def scale(self, c) -> "PsiFunction":
        return self.then(Transform("scale", Fraction(c)))

    def round_down(self, p: int) -> "PsiFunction":
        return self.then(Transform("round", p))

    def restrict(self, pred: Predicate) -> "PsiFunction":
        return self.then(Transform("restrict", pred))

    @property
    def spec(self) -> str:
        f = self.family
        if f == "power":
            head = f"power:{self.params[0]},{self.params[1]}"
        elif f == "log":
            head = f"log:{self.params[0]}"
        elif f == "indicator":
            head = f"indicator:{self.params[0]},{self.params[1].render()}"
        elif f == "table":
            head = f"table:{self.params[0]}"
        else:
            head = f
        return ";".join([head] + [t.render() for t in self.transforms])


def eval_psi(psi: PsiFunction, n: int) -> Fraction:
    return psi(n)


def power_law(c, s: int) -> PsiFunction:
    c = Fraction(c)
    if c <= 0:
        raise PsiSpecError("power_law needs c > 0")
    if int(s) != s or s <= 0:
        raise PsiSpecError(f"power_law exponent must be a positive integer, got {s}")
    return PsiFunction("power", (c, int(s)))


def log_weighted(c) -> PsiFunction:
    return PsiFunction("log", (Fraction(c),))


def zero_one_failure(p: int) -> PsiFunction:
    """1/p on multiples of p, 0 elsewhere."""
    if not is_prime(p):
        raise PsiSpecError(f"{p} is not prime")
    return PsiFunction("indicator", (Fraction(1, p), Predicate("divisible", (p,))))


def zero() -> PsiFunction:
    return PsiFunction("zero")


def parse_table(text: str, source: str = "table") -> dict[int, Fraction]:
    entries: dict[int, Fraction] = {}
    last = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise PsiSpecError(f"{source}:{lineno}: expected 'n value', got {raw!r}")
        try:
            n, value = int(parts[0]), Fraction(parts[1])
        except ValueError as exc:
            raise PsiSpecError(f"{source}:{lineno}: {exc}") from None
        if n <= last:
            raise PsiSpecError(f"{source}:{lineno}: n must be strictly increasing")
        if value < 0:
            raise PsiSpecError(f"{source}:{lineno}: negative value")
        entries[n] = value
        last = n
    return entries


def load_table(path: str | Path) -> PsiFunction:
    path = Path(path)
    return PsiFunction("table", (str(path),), table=parse_table(path.read_text(), str(path)))


def builtin_families() -> dict[str, Callable[..., PsiFunction]]:
    return {
        "power": power_law,
        "log": log_weighted,
        "zero-one": zero_one_failure,
        "table": load_table,
        "zero": zero,
    }


def _frac(tok: str) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise PsiSpecError(f"bad rational {tok!r}") from None


def _int(tok: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise PsiSpecError(f"bad integer {tok!r}") from None


def parse_predicate(text: str) -> Predicate:
    name, _, rest = text.partition(":")
    args = tuple(_int(t) for t in rest.split(",")) if rest else ()
    arity = {"squarefree": 0, "divisible": 1, "coprime": 1, "pfree": 2, "le": 1}
    if name not in arity or len(args) != arity[name]:
        raise PsiSpecError(f"bad predicate {text!r}")
    return Predicate(name, args)


def parse_psi(spec: str) -> PsiFunction:
    parts = [s.strip() for s in spec.split(";") if s.strip()]
    if not parts:
        raise PsiSpecError("empty psi spec")
    head, *rest = parts
    name, _, arg = head.partition(":")
    if name == "power":
        toks = arg.split(",")
        if len(toks) != 2:
            raise PsiSpecError(f"power needs c,s: {head!r}")
        s = _frac(toks[1])
        if s.denominator != 1:
            raise PsiSpecError(f"power_law exponent must be an integer, got {s}")
        psi = power_law(_frac(toks[0]), int(s))
    elif name == "log":
        psi = log_weighted(_frac(arg))
    elif name == "zero-one":
        psi = zero_one_failure(_int(arg))
    elif name == "indicator":
        c, _, pred = arg.partition(",")
        psi = PsiFunction("indicator", (_frac(c), parse_predicate(pred)))
    elif name == "table":
        psi = load_table(arg)
    elif name == "zero":
        psi = zero()
    else:
        raise PsiSpecError(f"unknown family {name!r}")
    for tok in rest:
        kind, _, arg = tok.partition(":")
        if kind == "scale":
            psi = psi.then(Transform("scale", _frac(arg)))
        elif kind == "round":
            p = _int(arg)
            if not is_prime(p):
                raise PsiSpecError(f"round needs a prime, got {p}")
            psi = psi.then(Transform("round", p))
        elif kind == "restrict":
            psi = psi.then(Transform("restrict", parse_predicate(arg)))
        elif kind == "cap":
            psi = psi.then(Transform("cap"))
        else:
            raise PsiSpecError(f"unknown transform {kind!r}")
    return psi
