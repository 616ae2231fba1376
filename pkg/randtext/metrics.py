from prometheus_client import CollectorRegistry, Counter, Gauge, Histogram, write_to_textfile

from .logger import get_logger

logger = get_logger(__name__)

REGISTRY = CollectorRegistry()

SYMBOLS_GENERATED_TOTAL = Counter(
    "randtext_symbols_generated_total",
    "Total number of symbols drawn by the generator.",
    registry=REGISTRY,
)

CHUNKS_PROCESSED_TOTAL = Counter(
    "randtext_chunks_processed_total",
    "Total number of generator chunks segmented and counted.",
    registry=REGISTRY,
)

WORDS_SEGMENTED_TOTAL = Counter(
    "randtext_words_segmented_total",
    "Total number of word tokens observed.",
    ["source"],
    registry=REGISTRY,
)

COMMAND_DURATION_SECONDS = Histogram(
    "randtext_command_duration_seconds",
    "Duration of CLI commands in seconds.",
    ["command"],
    registry=REGISTRY,
)

COMMAND_LAST_STATUS = Gauge(
    "randtext_command_last_status",
    "Exit code of the last run of each command.",
    ["command"],
    registry=REGISTRY,
)

COMPARISON_ROWS_TOTAL = Counter(
    "randtext_comparison_rows_total",
    "Comparison rows evaluated, by outcome.",
    ["outcome"],
    registry=REGISTRY,
)

FIT_ALPHA_HAT = Gauge(
    "randtext_fit_alpha_hat",
    "Last fitted rank-frequency exponent.",
    ["method"],
    registry=REGISTRY,
)


def export_metrics(textfile_path: str) -> None:
    try:
        write_to_textfile(textfile_path, REGISTRY)
        logger.debug(f"Metrics written to {textfile_path}")
    except OSError as e:
        logger.error(f"Failed to write metrics to {textfile_path}: {e}")
