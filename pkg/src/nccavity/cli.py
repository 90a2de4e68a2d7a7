"""Command-line entry point ``nccavity-bench``."""
from __future__ import annotations

import argparse
import logging
import sys

from .bench import RunConfig, run


def _floats(text):
    return [float(t) for t in str(text).replace(",", " ").split()]


def _ints(text):
    return [int(t) for t in str(text).replace(",", " ").split()]


def _bool(text):
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text!r}")


def read_config_file(path) -> dict:
    """``key = value`` lines; keys are the long flag names (``max-iters`` or
    ``max_iters``); ``#`` starts a comment."""
    conv = {
        "re": _floats, "n": _ints, "tol": float, "max_iters": int, "continuation": _bool,
        "profiles": _bool, "contours": _bool, "indicators": _bool, "check_dof": _bool,
        "out": str, "format": str, "verbose": _bool,
    }
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            key = key.lstrip("-").replace("-", "_").lower()
            if key not in conv:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = conv[key](val)
    return values


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="nccavity-bench",
        description="Lid-driven cavity benchmark with the P1-nonconforming / checkerboard-free P0 pair.",
    )
    p.add_argument("--config", help="key = value file mirroring the flags; flags override it")
    p.add_argument("--re", type=_floats, help="Reynolds numbers, e.g. '100,1000'")
    p.add_argument("--n", type=_ints, help="cells per side (even), e.g. '64,128'")
    p.add_argument("--tol", type=float, help="relative Picard tolerance (default 1e-10)")
    p.add_argument("--max-iters", type=int, dest="max_iters", help="Picard steps per stage (default 200)")
    p.add_argument("--continuation", type=_bool, help="Reynolds continuation above Re=1000 (default true)")
    p.add_argument("--profiles", action="store_const", const=True, help="centerline profiles vs the spectral reference")
    p.add_argument("--contours", action="store_const", const=True, help="write psi/omega grids and contour levels")
    p.add_argument("--indicators", action="store_const", const=True, help="gate on flow rate, compatibility and divergence")
    p.add_argument("--check-dof", action="store_const", const=True, dest="check_dof",
                   help="compare discrete dimensions with the published counts")
    p.add_argument("--out", help="output directory (default ./results)")
    p.add_argument("--format", choices=("csv", "json"), help="table format (default csv)")
    p.add_argument("--verbose", action="store_const", const=True, help="Picard progress on stderr")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    values = read_config_file(args.config) if args.config else {}
    cli = {k: v for k, v in vars(args).items() if k != "config" and v is not None}
    values.update(cli)
    # a bare --check-dof without --re only counts degrees of freedom
    if values.get("check_dof") and "re" not in values:
        values["re"] = []
    logging.basicConfig(level=logging.INFO if values.get("verbose") else logging.WARNING,
                        format="%(message)s", stream=sys.stderr)
    try:
        config = RunConfig(**values)
    except (TypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
