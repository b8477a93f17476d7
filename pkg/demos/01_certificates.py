"""Which term operations keep integrable inputs integrable?

Walks through a few terms: their exact values, the linear bound that
certifies them, and what happens for the squaring operation, which has no
such bound but stays bounded on bounded boxes.
"""

from gmpy2 import mpq

from integrable_ops import classify, evaluate, infer_bound, interval_bound, parse
from integrable_ops.certify import symmetric_box
from integrable_ops.exact import format_rational

TERMS = [
    ("trunc(x0)", "t"),
    ("tsup[n] cap=trunc(x0) : n*(x0 - trunc(x0))", "t"),
    ("3*x0 + (x1 v -2*x2)", "t"),
    ("one + x0", "u"),
    ("sq(x0)", "ext"),
]

print("Exact values at x0 = 3, 1, 1/2 for the threshold gadget")
gadget = parse(TERMS[1][0])
for x in (3, 1, mpq(1, 2)):
    print(f"  x0 = {format_rational(mpq(x))}: {format_rational(evaluate(gadget, {0: mpq(x)}))}")
print()

for text, sig in TERMS:
    t = parse(text, sig)
    c = classify(t, [symmetric_box(range(3), 10)])
    print(text)
    print("  " + c.flags_line())
    if c.certificate is not None:
        print(f"  bound |t(v)| <= {c.certificate}")
    else:
        box, enclosure = c.box_bound_witness
        print(f"  no linear bound; on [-10, 10] the values stay in {enclosure}")
    print()

# the certificate is a pointwise promise, so it can be checked at any point
t = parse("3*x0 + (x1 v -2*x2)")
cert = infer_bound(t)
point = {0: mpq(-7, 2), 1: mpq(5), 2: mpq(100)}
value = evaluate(t, point)
print(f"at {point}: |t| = {format_rational(abs(value))} <= {format_rational(cert.bound_at(point))}")

sq = parse("sq(x0)")
for m in (1, 3, 10):
    print(f"sq(x0) on [-{m}, {m}] -> {interval_bound(sq, {0: symmetric_box([0], m)[0]})}")
