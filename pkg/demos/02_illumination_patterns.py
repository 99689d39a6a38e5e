"""Illumination-pattern tooling: generation, counting, quantization.

Shows the constrained random generator (full slots, every beam once),
the enumeration/counting pair used as a brute-force oracle, and the
round-trip from a continuous relaxation back to a valid binary pattern.
"""

import numpy as np

from beamhop import (
    RelaxedPattern,
    count_unordered_patterns,
    enumerate_patterns,
    quantize,
    random_pattern,
    repair_coverage,
)

print("== random pattern, 6 beams / 2 per slot / 3 slots ==")
pat = random_pattern(6, 2, 3, np.random.default_rng(7))
print(pat.x)
print("column sums:", pat.column_sums(), " row sums:", pat.row_sums())

print("\n== enumeration and counting ==")
ordered = enumerate_patterns(6, 2, 3)
print(f"ordered patterns: {len(ordered)}")
print(f"unordered (slot order ignored): {count_unordered_patterns(6, 2, 3)}")

print("\n== quantizing a relaxed point ==")
rng = np.random.default_rng(3)
relaxed = RelaxedPattern(x_vec=rng.uniform(size=18), n_s=6, m=3)
print("relaxed weights:")
print(np.round(relaxed.weights(), 3))
rounded = quantize(relaxed, 6, 2, 3)
print("after rounding + largest-K trim:")
print(rounded.x)
repaired = repair_coverage(rounded, relaxed, 2)
print("after coverage repair (every row lit at least once):")
print(repaired.x)
print("column sums:", repaired.column_sums(), " row sums:", repaired.row_sums())

print("\n== JSON round trip ==")
print(repaired.to_json())
