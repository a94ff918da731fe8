"""
Secure degrees of freedom of the MIMO wiretap channel with a cooperative jammer.

Closed-form s.d.o.f. calculators, achievable-scheme precoders, Gaussian and
structured signaling, receiver pipelines and rate-slope experiments.
"""
from .channel import AntennaConfig, ChannelInstance, awgn, compute_rho, sample_channel
from .dof import converse_envelope, theorem1_sdof, theorem2_sdof
from .linalg import Tolerance
from .schemes import build_precoders, select_scheme

__version__ = "0.1.0"
