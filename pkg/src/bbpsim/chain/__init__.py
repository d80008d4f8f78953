from bbpsim.chain.primitives import COINBASE_PLACEHOLDER, ESCROW, ZERO_HASH, AccountId, Hash256
from bbpsim.chain.model import Block, BlockHeader, Transaction, WorldState
from bbpsim.chain.codec import body_hash, state_root, tx_hash
from bbpsim.chain.genesis import genesis_block
