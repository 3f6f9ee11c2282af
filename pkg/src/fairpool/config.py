"""Configuration management for fairpool."""

import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from .axioms import CheckBudget
from .constants import (
    DEFAULT_EPSILON_N_MAX,
    DEFAULT_MAX_ROUNDS,
    DEFAULT_N_MAX,
    DEFAULT_SEED,
    DEFAULT_SIM_MAX_ROUND_LENGTH,
    DEFAULT_SIM_P,
    DEFAULT_SIM_ROUNDS,
    DEFAULT_TOLERANCE,
    DEFAULT_TRIALS,
    SEED_ENV_VAR,
)
from .exceptions import CodecError, ConfigError, InvalidRewardError
from .models import RewardConfig, parse_rational


class FairpoolConfig:
    """Configuration manager for fairpool."""

    def __init__(self, config_path: Optional[str] = None):
        """Initialize configuration.

        Args:
            config_path: Path to configuration file. If None, looks for default locations.
        """
        self.config_path = self._find_config_file(config_path)
        self._config: Dict[str, Any] = {}
        self.load_config()

    def _find_config_file(self, config_path: Optional[str] = None) -> Optional[str]:
        """Find configuration file in default locations."""
        if config_path:
            return config_path

        possible_paths = [
            "fairpool.yaml",
            "~/.config/fairpool/config.yaml",
            "~/.fairpool.yaml",
            "/etc/fairpool/config.yaml",
        ]

        for path in possible_paths:
            expanded_path = Path(path).expanduser()
            if expanded_path.exists():
                return str(expanded_path)

        return None

    def load_config(self) -> None:
        """Load configuration from file."""
        if not self.config_path:
            self._config = self._get_default_config()
            return

        try:
            with open(self.config_path) as f:
                user_config = yaml.safe_load(f) or {}
        except (OSError, yaml.YAMLError) as e:
            raise ConfigError(
                f"Failed to load configuration from {self.config_path}: {e}"
            ) from e
        if not isinstance(user_config, dict):
            raise ConfigError(f"Configuration in {self.config_path} must be a mapping")

        self._config = self._merge_configs(self._get_default_config(), user_config)

    def _get_default_config(self) -> Dict[str, Any]:
        return {
            "fairpool": {
                "reward": {
                    "block_reward": "1",
                    "fee": "0",
                },
                "check": {
                    "n_max": DEFAULT_N_MAX,
                    "max_rounds": DEFAULT_MAX_ROUNDS,
                    "trials": DEFAULT_TRIALS,
                    "seed": None,
                    "tolerance": DEFAULT_TOLERANCE,
                },
                "epsilon": {
                    "n_max": DEFAULT_EPSILON_N_MAX,
                },
                "simulation": {
                    "p": DEFAULT_SIM_P,
                    "rounds": DEFAULT_SIM_ROUNDS,
                    "max_round_length": DEFAULT_SIM_MAX_ROUND_LENGTH,
                },
                "logging": {
                    "level": "INFO",
                },
            }
        }

    def _merge_configs(
        self, default: Dict[str, Any], user: Dict[str, Any]
    ) -> Dict[str, Any]:
        """Merge user config with defaults."""
        result = default.copy()
        for key, value in user.items():
            if (
                key in result
                and isinstance(result[key], dict)
                and isinstance(value, dict)
            ):
                result[key] = self._merge_configs(result[key], value)
            else:
                result[key] = value
        return result

    def _number(self, key: str, kind: type, default: Any) -> Any:
        value = self.get(key, default)
        if value is None:
            return default
        try:
            return kind(value)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Configuration key {key!r} must be {kind.__name__}, got {value!r}") from e

    @property
    def reward(self) -> RewardConfig:
        """Block reward and fee from ``fairpool.reward``."""
        try:
            return RewardConfig(
                parse_rational(str(self.get("fairpool.reward.block_reward", "1"))),
                parse_rational(str(self.get("fairpool.reward.fee", "0"))),
            )
        except (CodecError, InvalidRewardError) as e:
            raise ConfigError(f"Invalid reward configuration: {e}") from e

    @property
    def n_max(self) -> int:
        return int(self._number("fairpool.check.n_max", int, DEFAULT_N_MAX))

    @property
    def max_rounds(self) -> int:
        return int(self._number("fairpool.check.max_rounds", int, DEFAULT_MAX_ROUNDS))

    @property
    def trials(self) -> int:
        return int(self._number("fairpool.check.trials", int, DEFAULT_TRIALS))

    @property
    def tolerance(self) -> float:
        return float(self._number("fairpool.check.tolerance", float, DEFAULT_TOLERANCE))

    @property
    def seed(self) -> int:
        """Seed from FAIRPOOL_SEED, then the file, then 0."""
        env = os.environ.get(SEED_ENV_VAR)
        if env:
            try:
                return int(env)
            except ValueError as e:
                raise ConfigError(f"{SEED_ENV_VAR} must be an integer, got {env!r}") from e
        return int(self._number("fairpool.check.seed", int, DEFAULT_SEED))

    @property
    def epsilon_n_max(self) -> int:
        return int(self._number("fairpool.epsilon.n_max", int, DEFAULT_EPSILON_N_MAX))

    @property
    def sim_p(self) -> float:
        return float(self._number("fairpool.simulation.p", float, DEFAULT_SIM_P))

    @property
    def sim_rounds(self) -> int:
        return int(self._number("fairpool.simulation.rounds", int, DEFAULT_SIM_ROUNDS))

    @property
    def sim_max_round_length(self) -> int:
        return int(
            self._number(
                "fairpool.simulation.max_round_length", int, DEFAULT_SIM_MAX_ROUND_LENGTH
            )
        )

    @property
    def log_level(self) -> str:
        """Get logging level."""
        result = self.get("fairpool.logging.level", "INFO")
        return str(result) if result is not None else "INFO"

    def budget(
        self,
        n_max: Optional[int] = None,
        max_rounds: Optional[int] = None,
        trials: Optional[int] = None,
        seed: Optional[int] = None,
    ) -> CheckBudget:
        """A CheckBudget with explicit arguments taking precedence over the file."""
        try:
            return CheckBudget(
                n_max=self.n_max if n_max is None else n_max,
                max_rounds=self.max_rounds if max_rounds is None else max_rounds,
                random_trials=self.trials if trials is None else trials,
                seed=self.seed if seed is None else seed,
                tolerance=self.tolerance,
                reward=self.reward,
            )
        except ValueError as e:
            raise ConfigError(f"Invalid check budget: {e}") from e

    def get(self, key: str, default: Any = None) -> Any:
        """Get configuration value by dotted key."""
        keys = key.split(".")
        value: Any = self._config
        for k in keys:
            if isinstance(value, dict) and k in value:
                value = value[k]
            else:
                return default
        return value
