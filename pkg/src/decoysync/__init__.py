"""Clock offset recovery from the decoy-state pattern of a BB84 channel."""

from .analysis import (PerformanceSeries, detection_count, key_rate_penalty, performance_score,
                       qber_estimate, score_crossing)
from .channel import (ChannelConfig, ClickSequence, apply_dead_time, apply_frequency_offset,
                      click_probability, simulate_detections)
from .config import Config, parse_config
from .errors import (DecoySyncError, DegenerateSeries, Infeasible, InvalidConfig, InvalidInput,
                     UndefinedQBER)
from .feasibility import (HardwareBudget, arrival_lock_limit, max_offset_for_transform,
                          required_transform_length, syntonization_smear)
from .harness import SweepRow, SweepSpec, emit_results, read_results, run_sweep, run_trial
from .protocol import (IntensityTable, StateSequence, Template, build_intensity_table,
                       generate_states, make_template)
from .sync import (CorrelationSeries, SyncEstimate, cross_correlate, peak_significance,
                   recover_frequency_and_offset, recover_offset)

__version__ = "0.1.0"
