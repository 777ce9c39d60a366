"""Completeness benchmarking: how close a model's out-of-sample error gets
to the table-lookup bound, relative to a domain naive rule."""

from ._core import (
    __version__,
    Dataset,
    chi_squared_pvalue,
    evaluate,
    features,
    filter_subjects,
    gen_games,
    gen_risk,
    gen_sequences,
    hetero,
    load_csv,
    parse_csv,
    round_percent,
    save_csv,
    subsample,
    to_csv,
)

__all__ = [
    "__version__",
    "Dataset",
    "chi_squared_pvalue",
    "evaluate",
    "features",
    "filter_subjects",
    "gen_games",
    "gen_risk",
    "gen_sequences",
    "hetero",
    "load_csv",
    "parse_csv",
    "round_percent",
    "save_csv",
    "subsample",
    "to_csv",
]
