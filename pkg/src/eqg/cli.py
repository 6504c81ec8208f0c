"""``eqg-verify`` command line entry point.

Exit status: 0 when every scored check passes, 1 when any fails, 2 for a
configuration error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import ConfigurationError
from .verify import SUITES, CheckSpec, run_suite

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

# config-file key -> CheckSpec field
_KEYS = {
    "tau": "tau",
    "hbar": "hbar",
    "jet-order": "jet_order",
    "trunc": "trunc",
    "tol-tier": "tol_tier",
    "seed": "seed",
    "samples": "samples",
    "report": "report",
}


def parse_complex(text: str) -> complex:
    """``"RE,IM"`` (or any Python complex literal) to a complex number."""
    text = text.strip()
    try:
        if "," in text:
            re_, im = text.split(",")
            return complex(float(re_), float(im))
        return complex(text.replace(" ", ""))
    except ValueError as exc:
        raise ConfigurationError(f"cannot parse complex value {text!r}") from exc


def _convert(field: str, raw: str):
    try:
        if field in ("tau", "hbar"):
            return parse_complex(raw)
        if field in ("jet_order", "trunc", "seed", "samples"):
            return int(raw)
    except ValueError as exc:
        raise ConfigurationError(f"invalid value for {field}: {raw!r}") from exc
    return raw.strip()


def read_config(path: str | Path) -> dict:
    """Flat ``key = value`` file; blank lines and ``#`` comments are skipped."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-").replace("_", "-")
        if key not in _KEYS:
            raise ConfigurationError(f"{path}:{lineno}: unknown key {key!r}")
        out[_KEYS[key]] = _convert(_KEYS[key], value)
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="eqg-verify",
        description="Numerical verification of elliptic dynamical quantum group identities.")
    p.add_argument("suites", nargs="*", metavar="SUITE",
                   help=f"one or more of: {', '.join(SUITES)}, all")
    p.add_argument("--config", help="key=value file; command-line flags take precedence")
    p.add_argument("--tau", help="modular parameter as RE,IM")
    p.add_argument("--hbar", help="numeric hbar as RE,IM")
    p.add_argument("--jet-order", type=int)
    p.add_argument("--trunc", type=int)
    p.add_argument("--tol-tier", choices=("default", "strict"))
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--report", help="write the JSON report here instead of stdout")
    return p


def resolve_spec(args: argparse.Namespace) -> tuple[CheckSpec, str | None]:
    opts = read_config(args.config) if args.config else {}
    for flag, field in _KEYS.items():
        value = getattr(args, flag.replace("-", "_"))
        if value is not None:
            opts[field] = _convert(field, value) if isinstance(value, str) else value
    report = opts.pop("report", None)
    spec = CheckSpec(suites=tuple(args.suites), **opts)
    return spec, report


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with status 2
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        spec, report_path = resolve_spec(args)
    except (ConfigurationError, TypeError) as exc:
        print(f"eqg-verify: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    report = run_suite(spec)
    text = report.to_json(indent=2)
    if report_path:
        try:
            Path(report_path).write_text(text + "\n", encoding="utf-8")
        except OSError as exc:
            print(f"eqg-verify: cannot write report: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    else:
        print(text)

    scored = [r for r in report.records if not r.informational]
    failed = report.failures()
    print(f"eqg-verify: {len(scored) - len(failed)}/{len(scored)} checks passed "
          f"({len(report.records) - len(scored)} informational) in {report.metadata['runtime_s']} s",
          file=sys.stderr)
    for r in failed:
        detail = r.error or f"residual {r.residual:.3e} > {r.tolerance:.1e}"
        print(f"  FAIL {r.name}: {detail}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
