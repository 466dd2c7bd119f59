"""Routing and timing tools for a Wilton switch-matrix FPGA fabric model."""
from .errors import *  # noqa: F401,F403
from .kinds import CENSUS, KINDS, InterconnectKind, Kind, kind_from_label
from .grammar import NodeName, PipRef, TileCoord, format_pip, parse_node, parse_pip, parse_tile
from .fabric import (Fabric, Wsm, build_fabric, census, downhill_nodes, load_fabric, save_fabric,
                     uphill_nodes)
from .nets import LogicCell, Net, Node
from .timing import (CalibrationRow, DelayModel, TimingReport, calibrate, default_model, estimate,
                     load_calibration)
from .router import (RingOscillator, RouteQuery, build_ro, build_ros, optimize_route,
                     place_endpoints, route, route_fixed)
from .extract import LevelReport, extract_levels
from .emit import EmitterConfig, emit_fixed_route, report_ros

__version__ = "0.1.0"
