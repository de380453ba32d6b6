from .dataset import (
    Dataset,
    FeatureDescriptor,
    ReconstructionSpec,
    SplitSpec,
    append_feature,
    apply_reconstruction,
    column_stats,
    constituent_stats,
    encode_interaction,
    interaction_column,
    interaction_name,
    remove_features,
    split,
)
from .io import dataset_frame, load_csv, write_csv
