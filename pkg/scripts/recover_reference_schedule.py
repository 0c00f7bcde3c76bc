"""Recover the unreported face length and schedule for the published optimal wheel.

The wheel counts, diameter, bucket width, depth, rake angle and cut speed are
pinned to their published values.  The face length is set just under the
rim-fit limit for 24 buckets on a 0.62 m wheel, and the excavation time gives
11.5 wheel turns.  The heating and electrolysis times are then the fastest
split that keeps the solar power within budget, rounded up to whole seconds.

Run:  python scripts/recover_reference_schedule.py > src/regolith_opt/data/reference_design.toml
"""

import math

from regolith_opt.config import design_to_mapping, dumps_flat
from regolith_opt.optimizer import optimize
from regolith_opt.problem import OptimizationProblem, SolverConfig, evaluate_design

PINNED = dict(
    wheel_count=2, bucket_count=24, wheel_diameter=0.62, bucket_width=0.063,
    cut_face_length=0.0811, penetration_depth=0.011, rake_angle=math.radians(10.0),
    cut_velocity=0.13, excavation_time=172.3,
)

problem = OptimizationProblem(solver=SolverConfig(objective="time", restarts=4)).with_fixed(**PINNED)
result = optimize(problem)
design = result.design
design = type(design)(**{**design.as_dict(),
                         "heating_time": float(math.ceil(design.heating_time)),
                         "electrolysis_time": float(math.ceil(design.electrolysis_time))})
ev = evaluate_design(design, OptimizationProblem())
assert ev.feasible, ev.residuals
print("# Published optimal wheel; face length and schedule recovered by")
print("# scripts/recover_reference_schedule.py")
print(dumps_flat(design_to_mapping(design)), end="")
