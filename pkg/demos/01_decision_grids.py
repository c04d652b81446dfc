"""Walk through the decision-grid reconstruction.

Each experiment arm is three multiple-price lists of 11 binary choices
between a single-stage live channel (A) and a two-stage gatekeeper
channel (B). One B-parameter improves monotonically down each list, so
the indifference row (position 6) locates the subject's switch point.
"""

from fractions import Fraction

import gatelab as gl

for scale, label in ((1, "short durations"), (2, "long durations, doubled")):
    print(f"\n=== scale {scale} ({label}) ===")
    print("set varies        pos  t_serve1_B  p_B    t_line_B  E[T_A]  E[T_B]  diff")
    for d in gl.build_experiment(scale):
        if d.position not in (1, 6, 11):
            continue  # show the ends and the indifference row
        e_a, e_b = gl.expected_time_A(d.a), gl.expected_time_B(d.b)
        varied = {1: "p_B", 2: "t_serve1_B", 3: "t_line_B"}[d.set_index]
        print(
            f"{d.set_index}   {varied:<12}  {d.position:>3}  {float(d.b.t_serve1_B):>10.0f}"
            f"  {float(d.b.p_B):<5.2f}  {float(d.b.t_line_B):>8.0f}"
            f"  {float(e_a):>6.0f}  {float(e_b):>6.0f}  {float(e_a - e_b):>+5.0f}"
        )

print("\nThe difference ladder is shared by all three sets (exact, by construction):")
decisions = gl.build_experiment(1)
ladder = sorted({(d.position, gl.expected_time_A(d.a) - gl.expected_time_B(d.b))
                 for d in decisions})
print(" ", [int(diff) for _, diff in sorted(set(ladder))])

print("\nDeterministic-equivalent transform (failure path always runs, rescaled):")
d = next(d for d in decisions if d.set_index == 1 and d.position == 6)
flat = gl.to_deterministic(d)
print(f"  before: p_B={d.b.p_B}, t_line_B={d.b.t_line_B}, t_serve2_B={d.b.t_serve2_B}"
      f"  -> E[T_B]={float(gl.expected_time_B(d.b)):.0f}")
print(f"  after:  p_B={flat.b.p_B}, t_line_B={flat.b.t_line_B}, "
      f"t_serve2_B={flat.b.t_serve2_B}  -> E[T_B]={float(gl.expected_time_B(flat.b)):.0f}")

# grids are built with Fraction probabilities so positions 1-11 carry
# exact differences; position 6 is exactly indifferent
assert gl.expected_time_A(d.a) - gl.expected_time_B(d.b) == Fraction(0)

from gatelab.io import write_grid_csv  # noqa: E402

write_grid_csv("grid_scale1.csv", decisions)
print("\nWrote grid_scale1.csv (33 rows).")
