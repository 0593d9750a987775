"""pmukit: measure the characteristic features of PMU time-series and
inject them into clean baselines to produce realistic synthetic datasets.
"""

__version__ = "0.1.0"

from .signal_model import (
    ChannelKind,
    ChannelSeries,
    FillerPolicy,
    SamplingSpec,
    new_channel_series,
    valid_segments,
)
from .preprocess import (
    AcfResult,
    NoiseProfile,
    VarianceComponents,
    WindowStats,
    angle_first_difference,
    angle_unwrap,
    autocorrelation,
    extract_noise,
    iid_score,
    median_filter,
    snr_db,
    variance_decomposition,
    windowed_stats,
)
from .anomaly import (
    CompletenessStats,
    FleetReport,
    OutlierConfig,
    OutlierReport,
    angle_outlier_scan,
    completeness,
    detect_outliers,
    fleet_summary,
)
from .modal import (
    BandLabel,
    ModeEstimate,
    ModeTrack,
    PencilConfig,
    classify_band,
    estimate_modes,
    flag_disturbance_windows,
    sliding_modal_scan,
)
from .synthesis import (
    BaselineSpec,
    GenerationRecord,
    InjectionSpec,
    MissingInjection,
    ModeInjection,
    OutlierInjection,
    derive_channel_seed,
    generate_baseline,
    inject_missing,
    inject_modes,
    inject_noise,
    inject_outliers,
    inject_time_skew,
    run_pipeline,
)
from .analysis import AnalyzeOptions, analyze_channel, analyze_fleet
from .config import ChannelPlan, parse_config
from .dataset_io import read_dataset, write_dataset
from .report import FeatureReport, read_report, write_report
from . import errors

__all__ = [name for name in dir() if not name.startswith("_")]
