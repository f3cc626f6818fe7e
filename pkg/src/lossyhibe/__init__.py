"""Hierarchical identity-based lossy trapdoor functions over asymmetric pairings."""

from .auxgen import PartitionReport, aux_adaptive, aux_injective, aux_selective, partition
from .dethibe import DetCiphertext, det_dec, det_enc, priv1_experiment
from .errors import (DimensionError, IdentityError, InvalidAdversary, LossyHibeError,
                     ParameterError)
from .groups import SECURE, TRANSPARENT, GroupSuite, suite_new
from .hibe import HibeCiphertext, PairwiseHash, hibe_dec, hibe_enc, hibe_mkgen
from .hibtdf import (ADAPTIVE, SELECTIVE, HfOutput, hf_del, hf_eval, hf_inv, hf_kg, hf_mkg,
                     hf_setup)
from .lossylab import (delta_bound, estimate_eta, eta_lower_bound, preoutput_stage,
                       run_experiment, verify_lemma2, verify_non_abort_bound)

__version__ = "0.1.0"
