"""
Root test configuration.

Loads .env before any test module is imported, using absolute path
resolution so the result does not depend on the working directory. If .env
is absent the file is simply not loaded.

Every test gets its own artifact directory through ``LIKEN_OUT_DIR`` so
executor and CLI runs never write into the checkout.
"""
from pathlib import Path

import pytest
from dotenv import load_dotenv

# tests/conftest.py -> tests/ -> project_root (where .env lives)
project_root = Path(__file__).resolve().parent.parent
env_path = project_root / ".env"

if env_path.exists():
    load_dotenv(env_path)  # override=False: shell values win


@pytest.fixture(autouse=True)
def isolated_out_dir(tmp_path, monkeypatch):
    out = tmp_path / "liken_out"
    monkeypatch.setenv("LIKEN_OUT_DIR", str(out))
    monkeypatch.delenv("LIKEN_PRECISION_CEILING", raising=False)
    return out
