"""Commands whose JSON output is pinned by golden files (paths relative to the repo root)."""
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
GOLDEN_DIR = ROOT / "tests" / "golden"

GOLDEN = {
    "dims_p1": ["dims", "--genus", "0", "--punctures", "3", "--max-n", "6"],
    "dims_elliptic": ["dims", "--genus", "1", "--compact", "--max-n", "2"],
    "crossing_p1": ["crossing", "--genus", "0", "--punctures", "3", "--mode", "conjecture2",
                    "--n-max", "50"],
    "crossing_elliptic": ["crossing", "--elliptic-example", "--rank", "1"],
    "crossing_none": ["crossing", "--genus", "0", "--punctures", "3", "--n-max", "2",
                      "--atp-places", "3"],
    "polylog_p7": ["polylog", "--p", "7", "--degree", "2", "--x", "7", "--order", "60"],
    "reduce_zdz": ["reduce", "--file", "tests/golden/zdz.txt"],
    "check_p1": ["check", "--standard-p1", "--depth", "2", "--deg-bound", "1", "--order", "60"],
}


def golden_path(name: str) -> Path:
    return GOLDEN_DIR / f"{name}.json"


if __name__ == "__main__":
    import os

    from unipotent.cli import run

    os.chdir(ROOT)
    for name, argv in GOLDEN.items():
        status, out = run(argv + ["--format", "json"])
        golden_path(name).write_text(out, encoding="utf-8")
        print(f"wrote {golden_path(name).relative_to(ROOT)} (status {status})")
