"""Small MNA circuit simulator for bulk-driven MOS amplifiers."""

from .analyses import (run_ac, run_dc_sweep, run_noise, run_op, run_tran,
                       set_temperature, temperature_sweep)
from .device_model import MosGeometry, MosModelCard, eval_mos
from .errors import (BdsimError, DomainError, NoConvergence, NotFound,
                     NotSettled, ParseError, SingularMatrix, TopologyError)
from .netlist import parse_netlist, read_netlist, unparse
from .solver import SolveOptions, newton_dc

__version__ = "0.1.0"
