"""Build the extension with cargo, import it and run a few quick checks.

Usage: python3 python/smoke_test.py [--no-build]
"""

import argparse
import pathlib
import shutil
import subprocess
import sys
import sysconfig
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent

MIRROR_CFG = """\
mode = mirror
target = 4
omega0 = 0.7
pulse_start = 6
ramp_up = 16
plateau = 56
ramp_down = 16
alpha = 0.1
t_c = 10
"""


def build(skip):
    if not skip:
        subprocess.run(
            ["cargo", "build", "--release", "-p", "chirped-bragg-py", "--features", "extension-module"],
            cwd=ROOT,
            check=True,
        )
    lib = ROOT / "target" / "release" / "libchirped_bragg_py.so"
    dest = pathlib.Path(tempfile.mkdtemp()) / ("chirped_bragg_py" + sysconfig.get_config_var("EXT_SUFFIX"))
    shutil.copy(lib, dest)
    sys.path.insert(0, str(dest.parent))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--no-build", action="store_true", help="reuse target/release")
    build(ap.parse_args().no_build)
    import chirped_bragg_py as cb

    r = cb.run_mirror(target=5)
    assert r.dominant_level == 5 and r.fidelity >= 0.99, r
    assert len(r.populations[0]) == len(r.labels) and len(r.times) == len(r.populations)
    assert abs(sum(r.populations[-1]) - 1.0) < 1e-9

    s = cb.run_splitter(target=6)
    assert abs(s.final_population(6) - s.final_population(-6)) < 1e-9, s

    cfg = cb.Config.parse(MIRROR_CFG)
    assert cb.Config.parse(cfg.emit()).snapshot() == cfg.snapshot()
    run = cfg.run()
    assert run.dominant_level == 4, run
    faster = cfg.with_value("plateau", 36.0).run()
    assert faster.dominant_level == 3, faster
    crossings = cfg.crossings()
    assert [c["pair"] for c in crossings[:3]] == [[0, 1], [1, 2], [2, 3]], crossings[:3]
    assert len(cfg.dressed_energies(30.0)) == len(run.labels)

    try:
        cb.Config.parse("mode = mirror\n")
    except ValueError as e:
        assert "missing required keys" in str(e)
    else:
        raise AssertionError("incomplete config accepted")

    sheet = cb.unit_sheet(50e3, 25, 0.1)
    assert sheet["span_hz"] == 2.5e6
    assert cb.critical_spread(25, 520.0) == 1 / 26000

    print(f"python smoke test passed: mirror F={r.fidelity:.4f}, splitter F={s.fidelity:.4f}")


if __name__ == "__main__":
    main()
