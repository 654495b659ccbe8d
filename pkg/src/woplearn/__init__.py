"""woplearn: learn window operators on binary images by lattice descent.

The library covers the whole loop: Boolean lattice machinery over pixel
windows, elementary binary morphology, characteristic-function / kernel /
basis representations, lattice-overparametrized operator classes, the
stochastic lattice descent trainer with full trace auditing, hierarchical
window selection, and PBM-based dataset tooling.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    InputError,
    ParseError,
    SizeCapError,
    WoplearnError,
)
from .lattice import (
    DEFAULT_WINDOW_CAP,
    ORIGIN,
    Interval,
    SubsetOfWindow,
    Window,
    enumerate_subsets,
    hamming_neighbors,
    leq,
    max_antichain,
    parse_interval,
    parse_offsets,
    parse_subset,
    parse_window,
    render_offsets,
)
from .morphology import (
    BOUNDARIES,
    TOROIDAL,
    ZERO_PAD,
    BinaryImage,
    StructuringElement,
    apply_table,
    complement,
    dilate,
    erode,
    intersection,
    interval_operator,
    pointwise,
    reflect,
    shift,
    subset_image,
    union,
)
from .representation import (
    BASIS_CAP,
    TABULATION_CAP,
    Basis,
    BooleanFunctionTable,
    KernelSet,
    PropertyReport,
    basis_of,
    characteristic_of,
    kernel_of,
    parse_table,
    property_report,
    reconstruct,
    render_table,
)
from .params import (
    ClassSpec,
    ErosionSupSpec,
    IntervalSupSpec,
    ParamPoint,
    SeqTablesSpec,
    all_neighbors,
    basis_of_param,
    bit_distance,
    canonical_key,
    effective_window,
    neighborhood_size,
    parse_param,
    random_init,
    realize,
    render_param,
    sample_neighbors,
)
from .learn import (
    Dataset,
    SLDAConfig,
    SamplePair,
    TrainResult,
    TrainTrace,
    empirical_error,
    holdout_error,
    iou_metric,
    lda,
    partition_batches,
    read_trace_csv,
    render_trace_csv,
    slda,
    write_trace_csv,
)
from .modelsel import (
    OuterConfig,
    SelectionResult,
    WindowLatticeSpec,
    hierarchical_slda,
    initial_node,
    render_selection_report,
    window_neighbors,
)
from .pbm import parse_pbm, read_pbm, render_pbm, write_pbm
from .datasets import Manifest, gen_dataset, load_dataset, read_manifest, write_manifest
