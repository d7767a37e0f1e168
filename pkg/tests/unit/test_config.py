"""
Unit tests for settings loading.
"""
import pytest

from nc_concentration.utils.config_loader import get_settings, load_config, reset_settings


@pytest.mark.unit
class TestLoadConfig:
    """Test YAML resolution."""

    def test_packaged_defaults(self):
        """Test the bundled config file."""
        raw = load_config()
        assert raw["constants"]["C"] == 2.0
        assert raw["report"]["schema_version"] == "1.0"

    def test_env_path(self, temp_dir, monkeypatch):
        """Test NC_CONFIG_PATH points at another file."""
        path = temp_dir / "custom.yaml"
        path.write_text("constants:\n  C: 3.5\n")
        monkeypatch.setenv("NC_CONFIG_PATH", str(path))
        assert load_config() == {"constants": {"C": 3.5}}

    def test_missing_file(self, temp_dir):
        """Test a missing file raises FileNotFoundError."""
        with pytest.raises(FileNotFoundError):
            load_config(str(temp_dir / "absent.yaml"))

    def test_empty_file(self, temp_dir):
        """Test an empty file loads as an empty mapping."""
        path = temp_dir / "empty.yaml"
        path.write_text("")
        assert load_config(str(path)) == {}


@pytest.mark.unit
class TestSettings:
    """Test validated settings and environment overrides."""

    def test_defaults(self):
        """Test the packaged values."""
        settings = get_settings()
        assert settings.constants.C == 2.0
        assert settings.monte_carlo.confidence == 0.999
        assert settings.monte_carlo.min_trials == 100
        assert settings.legendre.grid_n == 2001
        assert settings.rip.enumeration_budget == 1_000_000

    def test_cached(self):
        """Test settings are loaded once until reset."""
        assert get_settings() is get_settings()

    def test_partial_file_keeps_defaults(self, temp_dir, monkeypatch):
        """Test sections missing from a custom file fall back to defaults."""
        path = temp_dir / "custom.yaml"
        path.write_text("constants:\n  C: 3.5\n")
        monkeypatch.setenv("NC_CONFIG_PATH", str(path))
        reset_settings()
        settings = get_settings()
        assert settings.constants.C == 3.5
        assert settings.solver.max_iter == 50000

    def test_env_overrides(self, monkeypatch):
        """Test NC_THREADS and NC_DEBUG."""
        monkeypatch.setenv("NC_THREADS", "3")
        monkeypatch.setenv("NC_DEBUG", "true")
        reset_settings()
        settings = get_settings()
        assert settings.runtime.threads == 3
        assert settings.monte_carlo.debug_checks is True

    def test_invalid_value(self, temp_dir, monkeypatch):
        """Test out-of-range values fail validation."""
        path = temp_dir / "bad.yaml"
        path.write_text("constants:\n  C: -1\n")
        monkeypatch.setenv("NC_CONFIG_PATH", str(path))
        reset_settings()
        with pytest.raises(ValueError):
            get_settings()
