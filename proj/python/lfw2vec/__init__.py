"""CBOW / Skip-gram word embeddings with learnable formulated weights (LFW)
and epoch-based dynamic windows (EDWS)."""

from ._lfw2vec import *  # noqa: F401,F403
from ._lfw2vec import __doc__  # noqa: F401
