from bbpsim.netsim.rng import RandomStreams, derive_stream
from bbpsim.netsim.scenario import Scenario, load_scenario
