"""CSV emission."""

from pathlib import Path

import pandas
from loguru import logger


def write_frame(frame: pandas.DataFrame, path: Path) -> Path:
    """Write a table as UTF-8 CSV with a header row and ``\\n`` line endings.

    Args:
        frame (pandas.DataFrame): Table to write.
        path (Path): Destination, parent directories are created.

    Returns:
        Path: The written path.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(
        path,
        index=False,
        encoding="utf-8",
        lineterminator="\n",
        float_format="%.12g",
    )
    logger.info(f"wrote {len(frame)} rows to {path}")
    return path
