"""GRRAP toolkit: exact binary-state network reliability via connected-vector
enumeration, plus swarm optimizers for redundancy/reliability allocation."""

from .network import Network, NetworkParseError, is_connected, parse_network
from .bat import (ConnectedVectorSet, EnumerationCapError, enumerate_connected,
                  next_vector, reliability)
from .grrap import (ArcParams, Evaluation, ProblemInstance, decode, encode,
                    g_cost, g_volume, g_weight, penalized_reliability,
                    subsystem_reliability, synthesize_instance)
from .swarm import (DEFAULT_SCHEDULE, SolverSpec, StageSchedule, TrySetting,
                    boundary_reset_r, boundary_update, run_solver)
from .ss3oa import OADesign, average_by_level, derive_try_table, run_tuning, select_schedule

__version__ = "0.1.0"
