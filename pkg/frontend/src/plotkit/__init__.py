"""Figure scripts for the parabolic-control benchmark outputs."""

from .figures import FIGURE_KINDS, make_figure, save_figure
from .io import (
    BENCH_COLUMNS,
    EmptySelectionError,
    MissingColumnError,
    read_bench_csv,
    read_history,
    read_manifest,
    read_slices,
    select_rows,
)

__version__ = "0.1.0"
