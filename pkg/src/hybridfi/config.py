import json
import logging
import os
from ast import literal_eval

from fvcore.common.config import CfgNode as CN

from hybridfi.errors import ConfigError

logger = logging.getLogger(__name__)


def add_data_config(cfg):
    cfg.DATA = CN()
    cfg.DATA.PATH = ""
    cfg.DATA.TARGET = ""
    # a positive TRAIN_COUNT wins over TRAIN_FRACTION
    cfg.DATA.TRAIN_COUNT = 0
    cfg.DATA.TRAIN_FRACTION = 0.75
    # z-score each constituent before multiplying interaction columns
    cfg.DATA.STANDARDIZE_INTERACTIONS = False


def add_regressor_config(cfg):
    cfg.REGRESSOR = CN()
    cfg.REGRESSOR.KIND = "random_forest"
    cfg.REGRESSOR.N_ESTIMATORS = 100
    cfg.REGRESSOR.MAX_DEPTH = None
    cfg.REGRESSOR.MIN_SAMPLES_LEAF = 1
    cfg.REGRESSOR.FEATURE_SUBSAMPLE = 1.0 / 3.0
    cfg.REGRESSOR.BOOTSTRAP = True
    # AdaBoost.R2 loss shape: linear | square | exponential
    cfg.REGRESSOR.LOSS = "linear"


def add_lime_config(cfg):
    cfg.LIME = CN()
    cfg.LIME.N_PERTURBATIONS = 5000
    # None means 0.75 * sqrt(feature count)
    cfg.LIME.KERNEL_WIDTH = None
    cfg.LIME.LASSO_LAMBDA = 0.01
    cfg.LIME.AGGREGATION = "sum"

    cfg.PICK = CN()
    cfg.PICK.METHOD = "sampling"
    cfg.PICK.BUDGET = 1000
    cfg.PICK.POOL_SIZE = None


def add_nid_config(cfg):
    cfg.MLP = CN()
    cfg.MLP.HIDDEN_SIZES = [64, 32, 16]
    cfg.MLP.L1_LAMBDA = 5e-5
    cfg.MLP.LEARNING_RATE = 1e-3
    cfg.MLP.EPOCHS = 200
    cfg.MLP.BATCH_SIZE = 128

    cfg.CUTOFF = CN()
    cfg.CUTOFF.MODE = "largest_gap"
    cfg.CUTOFF.K = None
    cfg.CUTOFF.MAX_CANDIDATES = 20


def add_pipeline_config(cfg):
    cfg.RECONSTRUCTION = CN()
    cfg.RECONSTRUCTION.REMOVAL_FRACTION = 0.10
    cfg.RECONSTRUCTION.MIN_REMOVED = 1
    cfg.RECONSTRUCTION.EMBED_ALL_INTERACTIONS = True

    cfg.SELECTION = CN()
    # None or "auto" means floor(n_II / 2)
    cfg.SELECTION.K_PRIME = None
    cfg.SELECTION.OBJECTIVE = "combined"


def add_synth_config(cfg):
    cfg.SYNTH = CN()
    cfg.SYNTH.N_ROWS = 1000
    cfg.SYNTH.N_FEATURES = 5
    # [[coefficient, [feature indices]], ...], indices 0-based
    cfg.SYNTH.TERMS = [[1.0, [0, 1]], [1.0, [2]]]
    cfg.SYNTH.NOISE_SIGMA = 0.1
    cfg.SYNTH.DISTRIBUTION = "uniform"


def get_cfg() -> CN:
    """A fresh copy of the default configuration tree."""
    cfg = CN()
    cfg.SEED = 0
    cfg.REPETITIONS = 5
    cfg.OUTPUT_DIR = "./output"
    cfg.NUM_WORKERS = 1
    add_data_config(cfg)
    add_regressor_config(cfg)
    add_lime_config(cfg)
    add_nid_config(cfg)
    add_pipeline_config(cfg)
    add_synth_config(cfg)
    return cfg


def _coerce_to_defaults(data, defaults, prefix: str = ""):
    """Accept integers where the default is a float; reject unknown keys."""
    if not isinstance(data, dict):
        raise ConfigError(f"config section {prefix or '<root>'} must be an object, got {type(data).__name__}")
    out = {}
    for key, value in data.items():
        full_key = f"{prefix}{key}"
        if key not in defaults:
            raise ConfigError(f"unknown config key {full_key}")
        default = defaults[key]
        if isinstance(default, CN):
            out[key] = _coerce_to_defaults(value, default, full_key + ".")
        elif isinstance(default, float) and isinstance(value, int) and not isinstance(value, bool):
            out[key] = float(value)
        else:
            out[key] = value
    return out


def load_config_file(path: str) -> dict:
    if not os.path.isfile(path):
        raise ConfigError(f"config file {path} does not exist")
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {path} is not valid JSON: {e}") from e
    return data


def merge_from_dict(cfg: CN, data: dict):
    try:
        cfg.merge_from_other_cfg(CN(_coerce_to_defaults(data, cfg)))
    except (KeyError, ValueError, AssertionError) as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(f"invalid configuration: {e}") from e


def merge_opts(cfg: CN, opts: list[str]):
    """`KEY VALUE` pairs with dotted keys, as detectron2's merge_from_list."""
    if len(opts) % 2 != 0:
        raise ConfigError(f"--opts needs KEY VALUE pairs, got {opts}")
    nested: dict = {}
    for key, raw in zip(opts[0::2], opts[1::2]):
        try:
            value = literal_eval(raw)
        except (ValueError, SyntaxError):
            value = raw
        node = nested
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = value
    merge_from_dict(cfg, nested)


def setup_cfg(args) -> CN:
    """
    Defaults, then the JSON config file, then `--opts`, then the explicit flag
    overrides; the returned tree is frozen.
    """
    cfg = get_cfg()
    if getattr(args, "config", None):
        merge_from_dict(cfg, load_config_file(args.config))
    merge_opts(cfg, list(getattr(args, "opts", None) or []))
    if getattr(args, "data", None):
        cfg.DATA.PATH = str(args.data)
    if getattr(args, "target", None):
        cfg.DATA.TARGET = args.target
    if getattr(args, "out", None):
        cfg.OUTPUT_DIR = str(args.out)
    if getattr(args, "seed", None) is not None:
        cfg.SEED = int(args.seed)
    validate_cfg(cfg)
    cfg.freeze()
    return cfg


def validate_cfg(cfg: CN):
    if cfg.SEED < 0:
        raise ConfigError(f"SEED must be nonnegative, got {cfg.SEED}")
    if cfg.REPETITIONS < 1:
        raise ConfigError(f"REPETITIONS must be positive, got {cfg.REPETITIONS}")
    if cfg.NUM_WORKERS == 0:
        raise ConfigError("NUM_WORKERS must be nonzero (negative counts follow joblib)")
    k_prime = cfg.SELECTION.K_PRIME
    if not (k_prime is None or k_prime == "auto" or (isinstance(k_prime, int) and not isinstance(k_prime, bool) and k_prime >= 0)):
        raise ConfigError(f"SELECTION.K_PRIME must be a nonnegative integer or 'auto', got {k_prime!r}")


def dump_cfg(cfg: CN, path: str):
    """Write the resolved configuration next to the outputs."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(cfg.dump())
    logger.info(f"Full config saved to {path}")
