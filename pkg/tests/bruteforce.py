"""Independent pairwise reference implementations used as test oracles.

Deliberately plain Python loops, sharing no code with the package internals.
"""


def dominates_ref(a, b) -> bool:
    better = False
    for x, y in zip(a, b):
        if x > y:
            return False
        if x < y:
            better = True
    return better


def constrained_dominates_ref(obj_a, viol_a, obj_b, viol_b) -> bool:
    if viol_a <= 0 and viol_b > 0:
        return True
    if viol_a > 0 and viol_b <= 0:
        return False
    if viol_a > 0 and viol_b > 0:
        return viol_a < viol_b
    return dominates_ref(obj_a, obj_b)


def filter_indices_ref(objectives, violations=None) -> list:
    """Surviving indices under constrained dominance, duplicates (by objective
    vector) kept once, input order preserved."""
    n = len(objectives)
    if violations is None:
        violations = [0.0] * n
    keep = []
    seen = set()
    for i in range(n):
        dominated = False
        for j in range(n):
            if j != i and constrained_dominates_ref(
                objectives[j], violations[j], objectives[i], violations[i]
            ):
                dominated = True
                break
        if dominated:
            continue
        key = tuple(objectives[i])
        if key in seen:
            continue
        seen.add(key)
        keep.append(i)
    return keep
