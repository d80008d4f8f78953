from bbpsim.execution.ledger import (ExecResult, FailureReason, SequenceResult, apply_tx, build_unexecutable_seq,
                                     execute_sequence, intersects)
from bbpsim.execution.validation import (Accept, Mismatch, Reject, ValidationCache, ValidationInfo, finalize_validate,
                                         full_validate, pre_validate, seal_block)
from bbpsim.execution.costs import ValidationCost, ValidationPath, validation_cost
