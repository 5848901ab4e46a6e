"""Lossless binary-image codec over a Bayesian mixture of quadtree
block segmentations, with exact sequential inference in O(depth) per
pixel, a maximum-posterior segmentation estimator, and a range-coded
container format."""

from .quadtree import (
    BlockId,
    HyperParams,
    QuadtreeModel,
    ROOT,
    block_contains,
    enumerate_models,
    model_prior,
    path_nodes,
)
from .leaf_model import Counts, predictive, update
from .weighting import (
    CodingState,
    StateError,
    advance,
    coding_probability,
    fixed_block_g,
    model_log_posterior,
    model_posterior,
    new_state,
    run_image,
    total_ideal_codelength,
)
from .map_tree import MapEstimate, compute_map, dump_model
from .coder import RangeDecoder, RangeEncoder, TruncatedStream, quantize
from .codec import CodecError, compress, decompress, measure_rate
from .pnm import PnmError, binarize, read_pnm, write_overlay, write_pbm, \
    write_pgm
from .synth import sample_image, sample_model, sample_params

__version__ = "0.1.0"

__all__ = [
    "BlockId", "HyperParams", "QuadtreeModel", "ROOT", "block_contains",
    "enumerate_models", "model_prior", "path_nodes",
    "Counts", "predictive", "update",
    "CodingState", "StateError", "advance", "coding_probability",
    "fixed_block_g", "model_log_posterior", "model_posterior", "new_state",
    "run_image", "total_ideal_codelength",
    "MapEstimate", "compute_map", "dump_model",
    "RangeDecoder", "RangeEncoder", "TruncatedStream", "quantize",
    "CodecError", "compress", "decompress", "measure_rate",
    "PnmError", "binarize", "read_pnm", "write_overlay", "write_pbm",
    "write_pgm",
    "sample_image", "sample_model", "sample_params",
]
