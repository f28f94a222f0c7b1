"""
Stability of finite sections
============================

Many operators on infinite-dimensional spaces are studied through their
n x n truncations.  Tracking ``gamma`` of the truncations as n grows tells
apart families whose sections stay uniformly stable from those that
degenerate.
"""
import relcalc as rc

families = {
    "harmonic diagonal 1/i": rc.FamilySpec("diagonal", "1/i", (2, 64)),
    "constant diagonal": rc.FamilySpec("diagonal", "1", (2, 64)),
    "discrete Laplacian": rc.FamilySpec("banded", "0", (2, 64), bands=((-1, "-1"), (0, "2"), (1, "-1"))),
}

for name, family in families.items():
    probe = rc.truncation_probe(family)
    print(f"{name:24s} slope {probe.slope:+.3f}  tail slope {probe.tail_slope:+.3f}  -> {probe.trend}")

probe = rc.truncation_probe(families["harmonic diagonal 1/i"])
print("\n  n   gamma_n     M_n")
for n, g, m in list(zip(probe.sizes, probe.gammas, probe.hus_constants))[::8]:
    print(f"{n:3d}  {g:.6f}  {m:8.2f}")
