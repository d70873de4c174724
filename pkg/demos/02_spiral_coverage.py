"""Show the scouts' spiral coverage plans.

A single scout walks the classic square spiral outward from the center.
With two scouts, each ring is split into two half arcs and the second scout
mirrors the first through the center, so they sweep opposite sides and
still cover every cell exactly once.
"""

from isrusim import build_spiral, ring_index

# small grid, one scout: print the visiting order cell by cell
n = 7
(plan,) = build_spiral(n * 5.0, 5.0, 1)
order = {cell: i for i, cell in enumerate(plan.visit_order)}
print(f"single scout, {n}x{n} grid - cells numbered in visiting order:")
for row in range(n - 1, -1, -1):
    print("  " + " ".join(f"{order[(col, row)]:>3}" for col in range(n)))

# the default arena, two scouts: show who owns each cell
n = 20
plans = build_spiral(n * 5.0, 5.0, 2)
owner = {}
for label, plan in zip("AB", plans):
    for cell in plan.visit_order:
        owner[cell] = label
print(f"\ntwo scouts, {n}x{n} grid (the default arena) - cell ownership:")
for row in range(n - 1, -1, -1):
    print("  " + "".join(owner[(col, row)] for col in range(n)))

# verify the plan contract numerically
cells = [c for plan in plans for c in plan.visit_order]
assert sorted(cells) == sorted((x, y) for x in range(n) for y in range(n)), \
    "plans must partition the grid exactly"
for plan in plans:
    for a, b in zip(plan.visit_order, plan.visit_order[1:]):
        assert abs(a[0] - b[0]) + abs(a[1] - b[1]) == 1, "steps must be adjacent"
    rings = [ring_index(c, n) for c in plan.visit_order]
    assert rings == sorted(rings), "ring index must never decrease"
print(f"\nchecked: exact partition of {n * n} cells, all steps edge-adjacent, "
      "ring order center-outward for both scouts")
print(f"share: scout A {len(plans[0].visit_order)} cells, "
      f"scout B {len(plans[1].visit_order)} cells")
