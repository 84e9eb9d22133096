"""Command line interface: ``sidecode {rates,code,verify,simulate,graph}``.

Exit codes: 0 success, 1 verification failed, 2 invalid input, 3 a search
cap was exceeded.  JSON goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._config import CapExceeded, caps_override
from .codec import (
    binning_simulate,
    build_index_code,
    build_zero_error_code,
    codebook_from_json,
    measured_rate,
    verify_index_code,
    verify_zero_error,
)
from .confusion import FunctionPair, IndexCodingInstance, index_confusion_graph, n_instance_graph
from .pmf import JointPmf, MultiPmf, PmfError
from .rates import analyze, index_coding_rate

EXIT_FAIL = 1
EXIT_INVALID = 2
EXIT_CAP = 3


class InstanceError(ValueError):
    """Invalid instance file; ``line`` points at the offending key when known."""

    def __init__(self, message: str, path: str = "", line: int | None = None):
        super().__init__(message)
        self.path = path
        self.line = line

    def diagnostic(self) -> str:
        where = self.path + (f":{self.line}" if self.line else "")
        return f"{where}: error: {self}" if where else f"error: {self}"


@dataclass
class Instance:
    name: str
    pmf: JointPmf | None = None
    fp: FunctionPair | None = None
    index: IndexCodingInstance | None = None

    @property
    def source(self):
        return self.index if self.index is not None else (self.pmf, self.fp)


def _line_of(text: str, key: str) -> int | None:
    m = re.search(r'"' + re.escape(key) + r'"\s*:', text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def _alphabet(spec, size: int, key: str, path: str, text: str) -> tuple:
    if spec is None:
        return tuple(range(size))
    if isinstance(spec, int):
        if spec != size:
            raise InstanceError(f"{key} is {spec} but the pmf has {size} entries on that axis", path, _line_of(text, key))
        return tuple(range(size))
    if not isinstance(spec, list) or len(spec) != size:
        raise InstanceError(f"{key} must list {size} symbols", path, _line_of(text, key))
    return tuple(spec)


def _table(raw, shape, key: str, path: str, text: str) -> list:
    if not isinstance(raw, list) or len(raw) != shape[0] or any(not isinstance(r, list) or len(r) != shape[1] for r in raw):
        raise InstanceError(f"{key} must be a {shape[0]}x{shape[1]} table", path, _line_of(text, key))
    return [[tuple(v) if isinstance(v, list) else v for v in row] for row in raw]


def parse_instance(text: str, path: str = "<instance>") -> Instance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceError(f"invalid JSON: {e.msg}", path, e.lineno) from None
    if not isinstance(data, dict):
        raise InstanceError("instance must be a JSON object", path, 1)
    name = str(data.get("name", Path(path).stem))
    if "index_coding" in data:
        ic = data["index_coding"]
        try:
            sources = MultiPmf.from_flat(ic["shape"], ic["pmf"])
            receivers = [r["has"] for r in ic["receivers"]]
            inst = IndexCodingInstance(sources, tuple(receivers))
        except KeyError as e:
            raise InstanceError(f"index_coding is missing {e.args[0]!r}", path, _line_of(text, "index_coding")) from None
        except (PmfError, TypeError, ValueError) as e:
            key = "receivers" if "receiver" in str(e) else "pmf"
            raise InstanceError(str(e), path, _line_of(text, key)) from None
        return Instance(name, index=inst)
    for key in ("pmf", "f", "g"):
        if key not in data:
            raise InstanceError(f"missing required key {key!r}", path, 1)
    try:
        probs = np.array(data["pmf"], dtype=float)
        if probs.ndim != 2:
            raise PmfError("pmf must be a 2-D array")
        pmf0 = JointPmf(probs)
    except (PmfError, ValueError, TypeError) as e:
        raise InstanceError(str(e), path, _line_of(text, "pmf")) from None
    xl = _alphabet(data.get("x_alphabet"), pmf0.x_size, "x_alphabet", path, text)
    yl = _alphabet(data.get("y_alphabet"), pmf0.y_size, "y_alphabet", path, text)
    pmf = JointPmf(probs, xl, yl)
    f = _table(data["f"], probs.shape, "f", path, text)
    g = _table(data["g"], probs.shape, "g", path, text)
    fp = FunctionPair(f, g)
    for key, getter in (("f", fp.f_values), ("g", fp.g_values)):
        try:
            getter(pmf)
        except PmfError as e:
            raise InstanceError(f"{key}: {e}", path, _line_of(text, key)) from None
    return Instance(name, pmf=pmf, fp=fp)


def load_instance(path: str) -> Instance:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise InstanceError(f"cannot read instance: {e.strerror}", path) from None
    return parse_instance(text, path)


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    raise TypeError(f"not serializable: {type(o).__name__}")


def _clean(o):
    if isinstance(o, float) and not math.isfinite(o):
        return None
    if isinstance(o, dict):
        return {str(k): _clean(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_clean(v) for v in o]
    return o


def dumps(obj) -> str:
    return json.dumps(_clean(json.loads(json.dumps(obj, default=_json_default))), sort_keys=True, indent=2)


def _emit(obj) -> None:
    sys.stdout.write(dumps(obj) + "\n")


# ------------------------------------------------------------- commands


def cmd_rates(args) -> int:
    inst = load_instance(args.instance)
    if inst.index is not None:
        _emit(
            {
                "name": inst.name,
                "index_coding_rate": index_coding_rate(inst.index),
                "provenance": {"index_coding_rate": "max over receivers of H(wanted sources | side information)"},
            }
        )
        return 0
    report = analyze(inst.pmf, inst.fp, with_ri=not args.no_ri, n_letters=args.letters, seed=args.seed)
    out = report.to_dict()
    out["name"] = inst.name
    _emit(out)
    return 0


def cmd_code(args) -> int:
    inst = load_instance(args.instance)
    if inst.index is not None:
        cb = build_index_code(inst.index, args.n, allow_heuristic=args.heuristic)
        rate = measured_rate(cb, inst.index)
    else:
        cb = build_zero_error_code(inst.pmf, inst.fp, args.n, allow_heuristic=args.heuristic)
        rate = measured_rate(cb, inst.pmf)
    text = cb.to_json() + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    summary = {"n": cb.n, "colors": len(set(cb.colors)), "exact_coloring": cb.exact, "measured_rate": rate, "out": args.out}
    sys.stderr.write(dumps(summary) + "\n")
    return 0


def cmd_verify(args) -> int:
    inst = load_instance(args.instance)
    try:
        cb = codebook_from_json(Path(args.codebook).read_text(), inst.source)
    except (OSError, ValueError, KeyError, TypeError) as e:
        raise InstanceError(f"invalid codebook: {e}", args.codebook) from None
    if inst.index is not None:
        result = verify_index_code(cb, inst.index)
    else:
        result = verify_zero_error(cb, inst.pmf, inst.fp)
    if result.ok:
        sys.stdout.write(f"PASS {result.checked} decodings checked\n")
        return 0
    sys.stdout.write("FAIL " + dumps(result.counterexample) + "\n")
    return EXIT_FAIL


def cmd_simulate(args) -> int:
    inst = load_instance(args.instance)
    if inst.index is not None:
        raise InstanceError("simulate needs a two-decoder instance", args.instance)
    try:
        out = binning_simulate(
            inst.pmf,
            inst.fp,
            args.rate,
            args.n,
            args.trials,
            args.seed,
            epsilon=args.epsilon,
            scheme=args.scheme,
            allow_uncoded=not args.no_uncoded,
        )
    except ValueError as e:
        raise InstanceError(str(e), args.instance) from None
    _emit(out.to_dict())
    return 0


def cmd_graph(args) -> int:
    inst = load_instance(args.instance)
    if inst.index is not None:
        g = index_confusion_graph(inst.index, args.n)
    else:
        g = n_instance_graph(inst.pmf, inst.fp, args.n)
    dot = g.to_dot(re.sub(r"\W", "_", inst.name) or "G")
    if args.dot:
        Path(args.dot).write_text(dot)
        _emit({"vertices": g.n, "edges": g.n_edges, "dot": args.dot})
    else:
        sys.stdout.write(dot)
    return 0


def _cap(text: str) -> tuple[str, int]:
    if "=" not in text:
        raise argparse.ArgumentTypeError("expected NAME=VALUE")
    name, value = text.split("=", 1)
    try:
        return name.strip().lower(), int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"cap value must be an integer: {value!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sidecode", description=__doc__.splitlines()[0])
    parser.add_argument("--cap", action="append", type=_cap, default=[], metavar="NAME=VALUE", help="override a search cap (repeatable)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rates", help="rate report as JSON")
    p.add_argument("instance")
    p.add_argument("--no-ri", action="store_true", help="skip the R_I optimization")
    p.add_argument("--letters", type=int, default=2, help="block lengths for the multi-letter upper estimate")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_rates)

    p = sub.add_parser("code", help="build a zero-error codebook")
    p.add_argument("instance")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--heuristic", action="store_true", help="fall back to heuristic coloring above the exact cap")
    p.set_defaults(func=cmd_code)

    p = sub.add_parser("verify", help="exhaustively verify a codebook")
    p.add_argument("codebook")
    p.add_argument("instance")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="Monte Carlo simulation of the epsilon-error scheme")
    p.add_argument("instance")
    p.add_argument("--scheme", choices=("binning", "covering"), default="binning")
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--no-uncoded", action="store_true", help="bin even when the rate allows uncoded transmission")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("graph", help="export the block confusion graph as DOT")
    p.add_argument("instance")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--dot")
    p.set_defaults(func=cmd_graph)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "n", 1) < 1:
            raise InstanceError("--n must be at least 1")
        with caps_override(**dict(args.cap)):
            return args.func(args)
    except InstanceError as e:
        sys.stderr.write(e.diagnostic() + "\n")
        return EXIT_INVALID
    except CapExceeded as e:
        sys.stderr.write(f"cap exceeded: {e}\n")
        return EXIT_CAP
    except (PmfError, ValueError) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
