"""Squaring sends an integrable function to a non-integrable one.

The construction picks points v^n where v^2 beats 2^n |v|, puts an atom of
mass 1/v^2 under each, and lets f take the value v^n on the n-th atom. Every
partial sum below is an exact rational.
"""

from integrable_ops import parse
from integrable_ops.exact import format_rational
from integrable_ops.witness import (
    Mode, WitnessConfig, build_witness, format_witness, parse_witness, verify_witness,
)

sq = parse("sq(x0)")

print("First atoms for p = 1 (arbitrary measure):")
cfg = WitnessConfig(p=1, atoms=6)
build = build_witness(sq, cfg)
for wp, (label, weight) in zip(build.violation.points, build.space.atoms):
    print(f"  {label}: v = {format_rational(wp.point[0])}, v^2 = {format_rational(wp.value)}, "
          f"mass = {format_rational(weight)}")
print()

for p in (1, 2):
    for mode in (Mode.ARBITRARY, Mode.FINITE):
        cfg = WitnessConfig(p=p, mode=mode, atoms=200)
        build = build_witness(sq, cfg)
        report = verify_witness(build.space, build.tables, sq, cfg)
        src = report.source_sums[0]
        print(f"p={p} mode={mode.value}: integral of |f|^p = {float(src):.6f} "
              f"(bound {float(report.tail_bounds[0]):.6f}), "
              f"integral of |f^2|^p = {format_rational(report.image_sum)}, "
              f"total mass {float(report.total_measure):.6f} -> {report.verdict}")
print()

# the text format survives a round trip, so a witness can be checked later
cfg = WitnessConfig(p=2, atoms=4, mode=Mode.FINITE)
text = format_witness(build_witness(sq, cfg), cfg)
print(text)
cfg2, space, tables = parse_witness(text)
print("re-verified:", verify_witness(space, tables, sq, cfg2).verdict)
