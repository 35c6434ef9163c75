from .grid import Grid, QUADRATURE_RULES, build_grid, grid_from_spec
from .samples import Dataset, FunctionalSample
from .inner import GramMatrix, cross_gram, gram, inner_product, l2_norm
from .profiles import (
    INTERPOLANTS,
    RawProfile,
    common_interval_end,
    dataset_from_profiles,
    ingest_profile,
    read_profiles_csv,
    read_wide_csv,
    truncate_interval,
    write_profiles_csv,
    write_wide_csv,
)
