from pathlib import Path

HYBRIDFI_ROOT = Path(__file__).parent.resolve()
HYBRIDFI_CONFIG_ROOT = HYBRIDFI_ROOT / "configs"
HYBRIDFI_SCHEMA_ROOT = HYBRIDFI_ROOT / "schemas"

__version__ = "0.1.0"
