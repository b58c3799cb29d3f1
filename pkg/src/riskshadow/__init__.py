"""Risk-shadowing agent filter, velocity planner and kinematic traffic simulator."""
from .encounter import AgentState, CollisionPoint, EncounterConfig, EncounterResult, closest_encounter, collision_point, predict_position
from .filtering import FilterDecision, FilterReport, Reason, run_filter
from .geometry import Footprint, Path, Pose2D, position_at, project_to_path, rectangle_distance
from .planner import CostBreakdown, PlannerConfig, VelocityProfile, generate_profiles, plan, score_profile
from .reachability import ReachArea, ReachConfig, ReachInterval, overlaps, reach_interval, widen
from .simulator import AgentSpec, Mode, Scenario, SimTrace, run, step

__version__ = "0.1.0"
