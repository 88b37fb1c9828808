"""Direct-formula oracle for the n = 12 golden instance.

Evaluates the split-sample moment, its Bartlett long-run variance and the
statistic in exact rational arithmetic, independently of the C++ code. The
printed values are frozen in tests/test_encompassing.cpp.

    python3 tests/oracles/golden_instance.py
"""
from fractions import Fraction
import math

n, mu0, M = 12, Fraction(2, 5), 2
m0 = math.floor(n * mu0)
e1 = [Fraction((-1) ** t) for t in range(n)]
e2 = [x / 2 for x in e1]


def moment_terms():
    out = []
    for t in range(n):
        w = Fraction(n, m0) if t < m0 else Fraction(n, n - m0)
        out.append(e1[t] ** 2 - w * e1[t] * e2[t] / 2)
    return out


def split_moment():
    first = sum(e1[t] * e2[t] for t in range(m0)) / m0
    second = sum(e1[t] * e2[t] for t in range(m0, n)) / (n - m0)
    return sum(x * x for x in e1) / n - (first + second) / 2


def bartlett(q):
    total = sum(x * x for x in q) / n
    for lag in range(1, M + 1):
        gamma = sum(q[t] * q[t - lag] for t in range(lag, n))
        total += 2 * (1 - Fraction(lag, M)) * gamma / n
    return total


d = moment_terms()
dbar = split_moment()
assert dbar == sum(d) / n
full = [x - dbar for x in d]
seg_means = (sum(d[:m0]) / m0, sum(d[m0:]) / (n - m0))
segment = [x - seg_means[0 if t < m0 else 1] for t, x in enumerate(d)]
omega2 = bartlett(full)
stat = math.sqrt(n) * float(dbar) / math.sqrt(float(omega2))
p = 0.5 * math.erfc(stat / math.sqrt(2))
print(f"m0 = {m0}")
print(f"dbar = {dbar} = {float(dbar)!r}")
print(f"omega2 (full centering) = {omega2} = {float(omega2)!r}")
print(f"statistic (full centering) = {stat!r}")
print(f"p_value (full centering) = {p!r}")
print(f"omega2 (segment centering) = {bartlett(segment)}")
