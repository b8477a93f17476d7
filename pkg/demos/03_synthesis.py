"""Building indicators and simple functions out of truncated terms.

Every term produced here uses only sums, scalings, joins, truncation and
truncated suprema, so each one comes with a certificate whose constant is 0.
"""

import warnings

from gmpy2 import mpq

from integrable_ops import evaluate, format_term, infer_bound, parse
from integrable_ops.evaluation import StabilityWarning
from integrable_ops.exact import format_rational
from integrable_ops.synthesis import (
    AllOf, SimpleFunctionSpec, ThresholdSet, indicator_ge, indicator_gt, ladder_term,
    region_indicator, simple_term,
)

gt = indicator_gt(0, mpq(3, 2))
print("1_{x0 > 3/2} =", format_term(gt))
ge = indicator_ge(0, mpq(3, 2))
xs = [mpq(-1), mpq(1), mpq(149, 100), mpq(3, 2), mpq(2)]
with warnings.catch_warnings():
    warnings.simplefilter("ignore", StabilityWarning)
    rows = [(x, evaluate(gt, {0: x}), evaluate(ge, {0: x})) for x in xs]
print("   x0    >3/2  >=3/2")
for x, a, b in rows:
    print(f"  {format_rational(x):>5}    {a}     {b}")
print("certificates:", infer_bound(gt), "|", infer_bound(ge))
print()

# a box indicator needs a dominator that is at least 1 on the box
box = AllOf((ThresholdSet(0, ">", 1), ThresholdSet(1, ">=", 2)))
ind = region_indicator(box, parse("meet(x0, x1)"))
for point in [(2, 3), (2, 2), (2, 1), (1, 5)]:
    env = {i: mpq(v) for i, v in enumerate(point)}
    print(f"1_box{point} = {evaluate(ind, env)}")
print()

g = parse("4*x0")
steps = [
    SimpleFunctionSpec(((1, ThresholdSet(0, ">", 1)),), g),
    SimpleFunctionSpec(((1, ThresholdSet(0, ">", 1)), (2, ThresholdSet(0, ">", 3))), g),
]
ladder = ladder_term(steps, g)
simple = simple_term(steps[1])
for x in (0, 2, 6):
    env = {0: mpq(x)}
    print(f"x0={x}: simple={evaluate(simple, env)} ladder={evaluate(ladder, env)}")
print("ladder certificate:", infer_bound(ladder))
