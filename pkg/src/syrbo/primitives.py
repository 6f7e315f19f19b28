"""Function set for the symbolic regressor.

Thirteen primitives with total ("protected") semantics, available in two
forms: :func:`apply` works on scalars, :data:`KERNELS` on numpy arrays.
Both forms are bit-identical on the same inputs.
"""

from __future__ import annotations

import enum

import numpy as np

#: Magnitude at or below which div, log and inv take their protected branch.
PROTECT_EPS = 0.001


class Primitive(enum.Enum):
    ADD = ("add", 2)
    SUB = ("sub", 2)
    MUL = ("mul", 2)
    DIV = ("div", 2)
    SQRT = ("sqrt", 1)
    LOG = ("log", 1)
    ABS = ("abs", 1)
    NEG = ("neg", 1)
    INV = ("inv", 1)
    MAX = ("max", 2)
    MIN = ("min", 2)
    IF3 = ("if3", 3)
    IF4 = ("if4", 4)

    def __init__(self, text: str, arity: int):
        self.text = text
        self.arity = arity

    def __repr__(self) -> str:
        return f"Primitive.{self.name}"

    @classmethod
    def from_text(cls, text: str) -> "Primitive":
        try:
            return _BY_TEXT[text]
        except KeyError:
            raise ValueError(f"unknown primitive {text!r}") from None


_BY_TEXT = {p.text: p for p in Primitive}

FUNCTION_SET: tuple[Primitive, ...] = tuple(Primitive)
BY_ARITY: dict[int, tuple[Primitive, ...]] = {
    a: tuple(p for p in Primitive if p.arity == a) for a in (1, 2, 3, 4)
}


# Array kernels. Callers are expected to run under np.errstate(all="ignore"):
# overflow to inf/nan is allowed and is dealt with by the fitness function.

def _div(a, b):
    return np.where(np.abs(b) <= PROTECT_EPS, 1.0, np.divide(a, b))


def _sqrt(a):
    return np.sqrt(np.abs(a))


def _log(a):
    m = np.abs(a)
    return np.where(m <= PROTECT_EPS, 0.0, np.log(m))


def _inv(a):
    return np.where(np.abs(a) <= PROTECT_EPS, 0.0, np.divide(1.0, a))


def _if3(c, a, b):
    return np.where(c >= 0, a, b)


def _if4(c, d, a, b):
    return np.where(c >= d, a, b)


KERNELS = {
    Primitive.ADD: np.add,
    Primitive.SUB: np.subtract,
    Primitive.MUL: np.multiply,
    Primitive.DIV: _div,
    Primitive.SQRT: _sqrt,
    Primitive.LOG: _log,
    Primitive.ABS: np.abs,
    Primitive.NEG: np.negative,
    Primitive.INV: _inv,
    Primitive.MAX: np.maximum,
    Primitive.MIN: np.minimum,
    Primitive.IF3: _if3,
    Primitive.IF4: _if4,
}


def apply(p: Primitive, args) -> float:
    """Evaluate one primitive on scalar arguments.

    :param p: the primitive.
    :param args: sequence of ``p.arity`` real numbers.
    :return: the protected result as a Python float.
    :raises ValueError: if the number of arguments does not match the arity.
    """
    if len(args) != p.arity:
        raise ValueError(f"{p.text} takes {p.arity} argument(s), got {len(args)}")
    # numpy scalars, not the math module: np.log and math.log can differ by an ulp
    x = [np.float64(a) for a in args]
    with np.errstate(all="ignore"):
        if p is Primitive.ADD:
            r = x[0] + x[1]
        elif p is Primitive.SUB:
            r = x[0] - x[1]
        elif p is Primitive.MUL:
            r = x[0] * x[1]
        elif p is Primitive.DIV:
            r = 1.0 if abs(x[1]) <= PROTECT_EPS else x[0] / x[1]
        elif p is Primitive.SQRT:
            r = np.sqrt(abs(x[0]))
        elif p is Primitive.LOG:
            r = 0.0 if abs(x[0]) <= PROTECT_EPS else np.log(abs(x[0]))
        elif p is Primitive.ABS:
            r = abs(x[0])
        elif p is Primitive.NEG:
            r = -x[0]
        elif p is Primitive.INV:
            r = 0.0 if abs(x[0]) <= PROTECT_EPS else 1.0 / x[0]
        elif p is Primitive.MAX:
            r = np.maximum(x[0], x[1])
        elif p is Primitive.MIN:
            r = np.minimum(x[0], x[1])
        elif p is Primitive.IF3:
            r = x[1] if x[0] >= 0 else x[2]
        else:
            r = x[2] if x[0] >= x[1] else x[3]
    return float(r)
