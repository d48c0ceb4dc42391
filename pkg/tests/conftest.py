# tests/conftest.py
"""
Pytest Configuration and Shared Fixtures

Purpose:
- Configure pytest markers for the numerical test tiers
- Provide shared fixtures for the two admissible parameter pairs, potentials,
  small Monte Carlo / quadrature specs and temporary run directories
- Build reduced run configurations so pipeline and CLI tests stay fast

This file is automatically loaded by pytest and provides fixtures available to all test modules.
"""

import os
import sys
from pathlib import Path

import pytest
import yaml

# Add parent directories to path for imports
sys.path.append(os.path.join(os.path.dirname(__file__), '..'))

# Import system components
from src.core.models import (
    InteractionSuiteSpec,
    LatticeSuiteSpec,
    McSpec,
    PohozaevSuiteSpec,
    PvQuadratureSpec,
    ResidualSuiteSpec,
    EnergySuiteSpec,
    RunConfig,
)
from src.energy.potentials import PotentialModel
from src.params.physical import make_params

# Test configuration constants
DEFAULT_PAIR = (6, 0.9)
SECOND_PAIR = (5, 0.8)
TEST_SEED = 12345
R_STAR_BUMP = 0.5 * (1.0 + (1.0 + 4.0 * 0.9) ** 0.5)

# =============================================================================
# PYTEST CONFIGURATION
# =============================================================================

def pytest_configure(config):
    """Configure pytest settings"""
    # Add custom markers
    config.addinivalue_line("markers", "unit: Fast closed-form and bookkeeping tests")
    config.addinivalue_line("markers", "numeric: Quadrature and root-finding tests")
    config.addinivalue_line("markers", "mc: Seeded Monte Carlo tests (tolerances in standard errors)")
    config.addinivalue_line("markers", "slow: Tests that take longer than 10 seconds")
    config.addinivalue_line("markers", "cli: Command line and run-directory tests")

def pytest_collection_modifyitems(config, items):
    """Modify test collection to add markers based on test names"""
    for item in items:
        name = item.nodeid.lower()
        # Monte Carlo estimators
        if "_mc" in name or "monte_carlo" in name or "oracle" in name:
            item.add_marker(pytest.mark.mc)

        # Principal-value quadrature and Newton solvers
        if "pv" in name or "newton" in name or "quadrature" in name:
            item.add_marker(pytest.mark.numeric)

        if "test_cli" in name:
            item.add_marker(pytest.mark.cli)

# =============================================================================
# PARAMETER FIXTURES
# =============================================================================

@pytest.fixture(scope="session")
def params_6():
    """Default test point (N=6, s=0.9)"""
    return make_params(*DEFAULT_PAIR)

@pytest.fixture(scope="session")
def params_5():
    """Second admissible pair (N=5, s=0.8)"""
    return make_params(*SECOND_PAIR)

@pytest.fixture(scope="session", params=[DEFAULT_PAIR, SECOND_PAIR], ids=["N6_s0.9", "N5_s0.8"])
def admissible_params(request):
    """Both admissible pairs"""
    return make_params(*request.param)

# =============================================================================
# POTENTIAL FIXTURES
# =============================================================================

@pytest.fixture(scope="session")
def bump_potential():
    """V = exp(-((r-1)^2 + |y''|^2)) in N=6"""
    return PotentialModel.gaussian_bump(6)

@pytest.fixture(scope="session")
def constant_potential():
    return PotentialModel.constant(1.0, 6)

# =============================================================================
# NUMERICAL SPEC FIXTURES
# =============================================================================

@pytest.fixture
def small_mc() -> McSpec:
    """Small seeded Monte Carlo spec"""
    return McSpec(n_samples=40_000, seed=TEST_SEED, shards=4)

@pytest.fixture
def pv_spec() -> PvQuadratureSpec:
    return PvQuadratureSpec()

# =============================================================================
# RUN FIXTURES
# =============================================================================

@pytest.fixture
def temp_run_dir(tmp_path) -> Path:
    """Fresh output directory for one run"""
    out = tmp_path / "run"
    out.mkdir()
    return out

@pytest.fixture
def small_run_config(tmp_path) -> RunConfig:
    """Reduced sample counts; same schema as config/run_default.yaml"""
    return RunConfig(
        N=6,
        s=0.9,
        k_list=[8, 16, 32, 64],
        mc=McSpec(n_samples=20_000, seed=TEST_SEED, shards=4),
        lattice=LatticeSuiteSpec(k_values=[64, 128, 200, 256, 512], cross_k_values=[100, 200, 400, 800]),
        interactions=InteractionSuiteSpec(lambda_d_grid=[10.0, 50.0], n_samples=20_000),
        energy=EnergySuiteSpec(k=4, fd_points=5, n_samples=20_000),
        residual=ResidualSuiteSpec(k_list=[8, 16], far_samples=4, j3_samples=2_000),
        pohozaev=PohozaevSuiteSpec(k=4, lam=1.0e3, lam_sweep=[1.0e3], n_samples=20_000),
        output_dir=str(tmp_path / "default_out"),
        suites=["lattice", "reduce"],
    )

@pytest.fixture
def run_config_file(tmp_path, small_run_config) -> Path:
    """small_run_config written as YAML"""
    path = tmp_path / "run.yaml"
    path.write_text(yaml.safe_dump(small_run_config.model_dump(mode="json"), sort_keys=True), encoding="utf-8")
    return path
