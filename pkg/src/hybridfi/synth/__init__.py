from .generate import DISTRIBUTIONS, SyntheticSpec, generate, synthetic_feature_names
from .oracles import brute_force_lasso, exhaustive_interaction_oracle
