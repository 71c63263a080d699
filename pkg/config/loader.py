"""
Configuration loader for the randUTV toolkit
"""

import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

DEFAULT_SETTINGS_PATH = Path(__file__).resolve().parent / "settings.yaml"
EXPERIMENTS_DIR = Path(__file__).resolve().parent / "experiments"


class ConfigLoader:
    """Load and manage toolkit configuration"""

    def __init__(self, config_path: Optional[str] = None):
        self.config_path = config_path or os.environ.get("RANDUTV_SETTINGS") or str(DEFAULT_SETTINGS_PATH)
        self._config = None

    def load_config(self) -> Dict[str, Any]:
        """Load configuration from YAML file"""
        if self._config is None:
            try:
                with open(self.config_path, 'r') as file:
                    self._config = yaml.safe_load(file) or {}
            except FileNotFoundError:
                raise FileNotFoundError(f"Configuration file not found: {self.config_path}")
            except yaml.YAMLError as e:
                raise ValueError(f"Error parsing configuration file: {e}")

        return self._config

    def _section(self, name: str) -> Dict[str, Any]:
        config = self.load_config()
        return config.get(name, {}) or {}

    def get_dense_config(self) -> Dict[str, Any]:
        """Get dense kernel configuration (gemm tile, desk-scale cap)"""
        return self._section('dense')

    def get_gemm_tile(self) -> int:
        return int(self.get_dense_config().get('gemm_tile', 64))

    def get_desk_cap(self) -> int:
        return int(self.get_dense_config().get('desk_cap', 1000))

    def get_jacobi_config(self) -> Dict[str, Any]:
        """Get Jacobi SVD oracle configuration"""
        return self._section('jacobi')

    def get_cpqr_config(self) -> Dict[str, Any]:
        """Get column-pivoted QR configuration"""
        return self._section('cpqr')

    def get_randutv_config(self) -> Dict[str, Any]:
        """Get randUTV defaults (block size, power iterations, oversampling)"""
        return self._section('randutv')

    def get_testmat_config(self) -> Dict[str, Any]:
        """Get test-matrix generator parameters"""
        return self._section('testmat')

    def get_experiment_config(self) -> Dict[str, Any]:
        """Get experiment harness configuration"""
        return self._section('experiments')

    def get_check_config(self) -> Dict[str, Any]:
        """Get tolerances used by --check mode"""
        return self._section('checks')

    def get_logging_config(self) -> Dict[str, Any]:
        """Get logging configuration"""
        return self._section('logging')

    def load_recipe(self, name_or_path: str) -> Dict[str, Any]:
        """Load an experiment recipe by file path or by name under config/experiments"""
        path = Path(name_or_path)
        if not path.exists():
            path = EXPERIMENTS_DIR / f"{name_or_path}.yaml"
        try:
            with open(path, 'r') as file:
                return yaml.safe_load(file) or {}
        except FileNotFoundError:
            raise FileNotFoundError(f"Experiment recipe not found: {name_or_path}")
        except yaml.YAMLError as e:
            raise ValueError(f"Error parsing experiment recipe {path}: {e}")


# Global config instance
config_loader = ConfigLoader()
