"""Ball and slab volumes across dimensions.

The volume of the unit ball peaks near d = 5 and then collapses; a slab of
the ball pinned between fractions a and b of the radius collapses even
faster, at the rate ln(r sqrt(1 - a^2)) per dimension.  This script prints
both, plus the sandwich that controls the slab: a bounding cylinder above
and a difference of cones below.
"""

import math

from contperc.geometry import SlabSpec, slab_log_rate, slab_volume, unit_ball_volume

print("unit ball volumes")
for d in (1, 2, 3, 5, 10, 20, 50, 100):
    print(f"  d={d:4d}  v_d = {unit_ball_volume(d):.6e}")

print("\nslab volume, r=1, a=0.5, b=1.0 (the cap above half height)")
for d in (2, 3, 5, 10, 20, 50):
    spec = SlabSpec(d, 1.0, 0.5, 1.0)
    print(f"  d={d:4d}  volume = {slab_volume(spec):.6e}")

print("\nper-dimension log rate, r=2, a=0.6, b=0.7")
limit = math.log(2.0 * math.sqrt(1.0 - 0.36))
for d in (10, 100, 1000, 10_000):
    rate = slab_log_rate(SlabSpec(d, 2.0, 0.6, 0.7))
    print(f"  d={d:6d}  rate = {rate:+.6f}   (limit {limit:+.6f})")

print("\npartition check in d=7: slabs over 0 < 0.3 < 0.8 < 1 tile the ball")
parts = [
    slab_volume(SlabSpec(7, 1.0, a, b)) for a, b in ((0.0, 0.3), (0.3, 0.8), (0.8, 1.0))
]
print(f"  sum of parts  = {sum(parts):.12f}")
print(f"  whole ball    = {unit_ball_volume(7):.12f}")
