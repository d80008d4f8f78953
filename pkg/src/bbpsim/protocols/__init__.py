from bbpsim.protocols.base import PROTOCOLS, NodeState, PropagationProtocol, ProtocolContext, get_protocol, register
from bbpsim.protocols.bbp import BodylessBlockPropagation
from bbpsim.protocols.bhp import HybridBlockPropagation
from bbpsim.protocols.cbp import CompactBlockPropagation
from bbpsim.protocols.events import Outcome
from bbpsim.protocols.lbp import LegacyBlockPropagation
