from ._core import (
    ClassifiedsError,
    Model,
    Record,
    clean,
    cross_validate,
    pearson,
    read_records,
    rmse,
    synthesize,
    write_csv,
)

__all__ = [
    "ClassifiedsError",
    "Model",
    "Record",
    "clean",
    "cross_validate",
    "pearson",
    "read_records",
    "rmse",
    "synthesize",
    "write_csv",
]
