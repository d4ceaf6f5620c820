"""CSV writing for every tabular artifact."""

import os
from pathlib import Path

import pandas as pd

from src.config import settings
from src.utils.logging import get_logger

logger = get_logger(__name__)

CSV_SEPARATOR = ","
CSV_LINE_TERMINATOR = "\n"
CSV_ENCODING = "utf-8"


class CSVService:
    """Writes DataFrames as `,`-separated, LF-terminated UTF-8 files under one directory.

    Floats use pandas' shortest round-trip representation, so identical
    inputs give byte-identical files.
    """

    def __init__(self, output_dir: str | Path | None = None):
        self.output_dir = Path(output_dir or settings.default_output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)

    def write(self, df: pd.DataFrame, filename: str) -> Path:
        """Write ``df`` to ``output_dir/filename``; returns the path."""
        validation = self.validate_dataframe(df)
        if not validation["valid"]:
            raise ValueError(f"cannot write {filename}: {validation['reason']}")

        if not filename.endswith(".csv"):
            filename += ".csv"
        csv_path = self.output_dir / filename
        csv_path.parent.mkdir(parents=True, exist_ok=True)

        try:
            df.to_csv(
                csv_path,
                sep=CSV_SEPARATOR,
                index=False,
                encoding=CSV_ENCODING,
                lineterminator=CSV_LINE_TERMINATOR,
            )
        except Exception as e:
            if csv_path.exists():
                os.remove(csv_path)
            logger.error("CSV write failed", path=str(csv_path), error=str(e), exc_info=True)
            raise

        logger.debug("CSV file written", path=str(csv_path), rows=len(df), columns=len(df.columns))
        return csv_path

    def validate_dataframe(self, df: pd.DataFrame) -> dict:
        """Check a DataFrame before writing it."""
        if df.empty:
            return {"valid": False, "reason": "DataFrame is empty"}
        if df.columns.duplicated().any():
            return {"valid": False, "reason": "DataFrame has duplicate column names"}
        rows, cols = df.shape
        return {"valid": True, "rows": rows, "columns": cols}

    @staticmethod
    def read(path: str | Path) -> pd.DataFrame:
        return pd.read_csv(
            path, sep=CSV_SEPARATOR, encoding=CSV_ENCODING, float_precision="round_trip"
        )
