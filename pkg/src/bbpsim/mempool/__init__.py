from bbpsim.mempool.pool import InsertResult, PoolEntry, TxPool, dump_pool_csv, insert_tx, reset_pool
from bbpsim.mempool.selection import PrePackedBody, legacy_select, merge_ppb, tso_select
