import shutil
import subprocess
import sys

import pytest


def _run_scenario(name: str, outdir) -> None:
    """Produce telemetry through the simulator's public CLI."""
    exe = shutil.which("ringswarm")
    cmd = [exe, "run", name, "-o", str(outdir)] if exe else [
        sys.executable, "-m", "ringswarm.cli", "run", name, "-o", str(outdir)
    ]
    subprocess.run(cmd, check=True, capture_output=True)


@pytest.fixture(scope="session")
def sim50_out(tmp_path_factory):
    out = tmp_path_factory.mktemp("sim50")
    _run_scenario("sim50", out)
    return out


@pytest.fixture(scope="session")
def insert4_out(tmp_path_factory):
    out = tmp_path_factory.mktemp("insert4")
    _run_scenario("insert4", out)
    return out
