"""
Programs, primitives and protected arithmetic
=============================================

A program is a flat prefix list of nodes. Each node is a primitive, a feature
index or a constant. The s-expression form is what gets saved to disk.
"""

import numpy as np

from syrbo.gp import evaluate
from syrbo.primitives import FUNCTION_SET, Primitive, apply
from syrbo.program import Program, parse_sexpr, to_sexpr

# the 13 primitives and their arities
for p in FUNCTION_SET:
    print(f"{p.text:>4}  arity {p.arity}")

# Division, log, sqrt and inverse never raise or return nan on bad input.
print(apply(Primitive.DIV, [1.0, 0.0]))    # 1.0
print(apply(Primitive.LOG, [-np.e]))       # 1.0, log of |x|
print(apply(Primitive.SQRT, [-4.0]))       # 2.0
print(apply(Primitive.INV, [0.0]))         # 0.0

###############################################################################
# Parse, print and evaluate

prog = parse_sexpr("(add (mul x0 x1) (div x2 0.5))")
print(prog.nodes)
print(to_sexpr(prog), "depth", prog.depth)

X = np.array([[1.0, 2.0, 3.0],
              [0.5, -1.0, 0.0]])
print(evaluate(prog, X))   # [8.  -0.5]

# building from nodes directly gives the same program
same = Program((Primitive.ADD, Primitive.MUL, 0, 1, Primitive.DIV, 2, 0.5))
assert same == prog
