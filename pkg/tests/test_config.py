import argparse

import pytest

from hybridfi import HYBRIDFI_CONFIG_ROOT
from hybridfi.config import setup_cfg
from hybridfi.errors import ConfigError
from hybridfi.lime import LimeConfig, PickConfig
from hybridfi.nid import CutoffConfig, MlpConfig
from hybridfi.pipeline import ReconstructionConfig, SelectionConfig
from hybridfi.regressors import RegressorSpec


def _args(config, **overrides):
    values = dict(config=str(config), opts=[], data=None, target=None, out=None, seed=None)
    values.update(overrides)
    return argparse.Namespace(**values)


@pytest.mark.parametrize("name", ["foundry_voltage_rf.json", "quick_adaboost.json", "synthetic_interaction.json"])
def test_shipped_configs_resolve(name):
    cfg = setup_cfg(_args(HYBRIDFI_CONFIG_ROOT / name))
    assert cfg.is_frozen()
    RegressorSpec.from_config(cfg, cfg.SEED)
    LimeConfig.from_config(cfg, cfg.SEED)
    PickConfig.from_config(cfg, cfg.SEED)
    MlpConfig.from_config(cfg, cfg.SEED)
    CutoffConfig.from_config(cfg)
    ReconstructionConfig.from_config(cfg)
    SelectionConfig.from_config(cfg)


def test_negative_seed_is_rejected():
    with pytest.raises(ConfigError, match="SEED"):
        setup_cfg(_args(HYBRIDFI_CONFIG_ROOT / "quick_adaboost.json", seed=-1))
