"""Deterministic stand-ins for external converters, runnable as
``python -m mmlkit.stubs <mode> [args]``.  Used by the stub registry and the
test suite; none of them perform real TeX conversion."""

from __future__ import annotations

import sys
import time

#: Namespace-less parallel markup for a/b, exercising the lenient parse path.
FRACTION_MARKUP = """<math><semantics>
  <mfrac id="p.2" xref="c.1">
  <mi id="p.1" xref="c.2">a</mi>
  <mi id="p.3" xref="c.3">b</mi></mfrac>
<annotation-xml encoding="MathML-Content"><apply>
  <divide id="c.1" xref="p.2"/>
  <ci id="c.2" xref="p.1">a</ci>
  <ci id="c.3" xref="p.3">b</ci></apply></annotation-xml>
<annotation encoding="application/x-tex">\\frac{a}{b}</annotation>
</semantics></math>"""


def main(argv: list[str]) -> int:
    if not argv:
        print("usage: python -m mmlkit.stubs <mode> [args]", file=sys.stderr)
        return 2
    mode, args = argv[0], argv[1:]
    if mode == "identity":
        sys.stdout.write(sys.stdin.read())
        return 0
    if mode == "echo-frac":
        sys.stdout.write(FRACTION_MARKUP)
        return 0
    if mode == "fail":
        print("synthetic converter failure", file=sys.stderr)
        return 1
    if mode == "slow":
        time.sleep(float(args[0]) if args else 5.0)
        sys.stdout.write("<math xmlns=\"http://www.w3.org/1998/Math/MathML\"/>")
        return 0
    if mode == "garbage":
        sys.stdout.write("this is not markup at all")
        return 0
    print(f"unknown stub mode {mode!r}", file=sys.stderr)
    return 2


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
