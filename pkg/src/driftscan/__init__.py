"""Non-parametric comparison of two windows of a multivariate series.

The toolkit decides whether a moving window still looks like a fixed
reference window. It offers four families of detectors: ordered-CDF
distance measures under a quorum vote, compression distance with a swap
bootstrap, kernel maximum mean discrepancy, and a conformal Martingale
over point streams. Calibration tables for the CDF measures come from
simulated nulls and are independent of window size and of the sampled
distribution.
"""

from .bench import (
    DISAGREEMENT_LEVELS,
    MEASURE_SET_NAMES,
    SENSITIVITY_METHODS,
    DisagreementStats,
    first_comparison_verdict,
    sensitivity_suite,
    unibench_suite,
)
from .calibration import (
    CalibrationSet,
    CalibrationTable,
    NullCloud,
    band_coverage,
    build_tables,
    representative_band,
    simulate_null_cloud,
    simulate_null_clouds,
)
from .conformal import (
    MartingaleState,
    MartingaleVerdict,
    Transducer,
    martingale_step,
    maybe_reset,
    pi_distribution_check,
    strangeness_scores,
)
from .datagen import (
    BlockAnnotation,
    SyntheticPlan,
    UniBenchAnnotation,
    UniBenchPlan,
    classified_to_series,
    gen_synthetic,
    gen_unibench,
)
from .detectors import (
    BLOCK_METHODS,
    DIFFERENT,
    SAME,
    MeasureQuorum,
    QuorumConfig,
    ScanPlan,
    ScanRecord,
    block_scan,
    default_tables,
    earliest_detection,
    error_count,
    martingale_scan,
    quorum_verdict,
    rejection_ratio,
)
from .errors import (
    ArgumentError,
    DriftscanError,
    EvaluationError,
    ParseError,
    StateError,
    ValidationError,
)
from .estimators import MartingaleDetector, MmdDetector, NcdDetector, OrderedCdfDetector
from .measures import (
    DEFAULT_QUORUM_MEASURES,
    EXTENSION_SET,
    STANDARD_SET,
    Ecdf1D,
    MeasureOutcome,
    all_measure_ids,
    baseline_stat,
    calibratable_ids,
    ecdf_from_samples,
    get_spec,
    measure_eval,
    measure_raw,
    pooled_from_samples,
)
from .mmd import MmdResult, median_bandwidth, mmd_linear, mmd_quadratic, mmd_test
from .ncd import NcdConfig, NcdResult, ncd, ncd_test
from .ordering import (
    ParallelismWarning,
    TopoPartition,
    build_mst,
    build_poset,
    ecdf_from_partition,
    ordered_partition,
    topo_partition_mst,
    topo_partition_poset,
)
from .series import (
    FormatOptions,
    Series,
    SeriesPoint,
    Window,
    parse_series,
    serialize_series,
    split_blocks,
    window_view,
)

__version__ = "0.1.0"
