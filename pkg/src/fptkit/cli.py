"""Command-line front end: ``fpt nu``, ``fpt monomial`` and ``fpt suite``.

Exit codes: 0 success, 1 failing suite case or cache mismatch, 2 bad input,
3 every level NOT_F_PURE_AT_LEVEL (a mathematical outcome, not an error),
4 resource limit.
"""

from __future__ import annotations

import argparse
import fcntl
import hashlib
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .errors import AllLevelsNotFPure, FPTError, NotMPrimary, ResourceLimit
from .estimator import bounds, conjecture, default_levels, nu_sequence
from .ffpoly import BracketLevel, PolyRing, SparsePoly, parse_poly
from .frobenius import IdealPair, NuRecord
from .harness import SUITES, SuiteSpec, check_golden, run_suite, write_golden
from .monomial import MonomialIdeal, fpt_lp, height, integral_closure, multiplicity

JSON_VERSION = 1
CACHE_FILE = "nu-cache-v1.jsonl"


def frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


# --- problem specs and the cache ----------------------------------------------

def _poly_terms(f: SparsePoly) -> list:
    return [[list(k), c] for k, c in f.terms.items()]


@dataclass(frozen=True)
class ProblemSpec:
    """Canonical identity of a nu problem, independent of the pretty-printer:
    polynomials are serialized as sorted ``[exponents, coefficient]`` lists."""

    prime: int
    variables: tuple
    gens: tuple
    multiplier: Optional[tuple] = None

    @classmethod
    def from_pair(cls, pair: IdealPair) -> "ProblemSpec":
        to_t = lambda f: tuple((tuple(k), c) for k, c in f.terms.items())  # noqa: E731
        return cls(
            pair.p,
            pair.ring.variables,
            tuple(to_t(g) for g in pair.gens),
            to_t(pair.multiplier) if pair.multiplier is not None else None,
        )

    @classmethod
    def from_json(cls, obj: dict) -> "ProblemSpec":
        """Rebuild from the ``fpt nu --json`` output."""
        variables = tuple(obj["vars"])
        p = obj["prime"]
        gens = [parse_poly(t, variables, p) for t in obj["pair"]["gens"]]
        mult = obj["pair"]["multiplier"]
        pair = IdealPair(PolyRing(p, variables), tuple(gens), parse_poly(mult, variables, p) if mult else None)
        return cls.from_pair(pair)

    def canonical(self) -> str:
        obj = {
            "prime": self.prime,
            "vars": list(self.variables),
            "gens": [[[list(k), c] for k, c in g] for g in self.gens],
            "multiplier": None if self.multiplier is None else [[list(k), c] for k, c in self.multiplier],
        }
        return json.dumps(obj, sort_keys=True, separators=(",", ":"))

    def digest(self, e: Optional[int] = None) -> str:
        text = self.canonical() if e is None else f"{self.canonical()}|e={e}"
        return hashlib.sha256(text.encode()).hexdigest()


def record_to_json(rec: NuRecord) -> dict:
    return {
        "e": rec.e,
        "q": rec.q,
        "nu": rec.nu,
        "witness": list(rec.witness) if rec.witness is not None else None,
    }


def record_from_json(p: int, obj: dict) -> NuRecord:
    witness = tuple(obj["witness"]) if obj["witness"] is not None else None
    return NuRecord(BracketLevel(p, obj["e"]), obj["nu"], witness)


def default_cache_dir() -> Path:
    env = os.environ.get("FPT_CACHE_DIR")
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or Path.home() / ".cache"
    return Path(base) / "fptkit"


class NuFileCache:
    """Append-only JSON-lines cache of nu records.

    One writer at a time holds an advisory ``flock``; readers skip a torn
    (unparseable) final line left by an interrupted write.
    """

    def __init__(self, directory: Path | str):
        self.path = Path(directory) / CACHE_FILE
        self._entries: Optional[dict] = None
        self.hits = 0

    def _load(self) -> dict:
        if self._entries is None:
            self._entries = {}
            if self.path.exists():
                lines = self.path.read_text().split("\n")
                for i, line in enumerate(lines):
                    if not line.strip():
                        continue
                    try:
                        obj = json.loads(line)
                    except json.JSONDecodeError:
                        if i >= len(lines) - 2:
                            continue  # torn final line
                        raise FPTError(f"corrupt cache line {i + 1} in {self.path}")
                    if obj.get("version") == __version__:
                        self._entries[obj["key"]] = obj["value"]
        return self._entries

    def get(self, pair: IdealPair, lvl: BracketLevel) -> Optional[NuRecord]:
        value = self._load().get(ProblemSpec.from_pair(pair).digest(lvl.e))
        if value is None:
            return None
        self.hits += 1
        return record_from_json(pair.p, value)

    def put(self, pair: IdealPair, record: NuRecord) -> None:
        key = ProblemSpec.from_pair(pair).digest(record.e)
        entry = {"key": key, "version": __version__, "value": record_to_json(record)}
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "a") as fh:
            fcntl.flock(fh, fcntl.LOCK_EX)
            try:
                fh.write(json.dumps(entry, sort_keys=True) + "\n")
                fh.flush()
            finally:
                fcntl.flock(fh, fcntl.LOCK_UN)
        self._load()[key] = entry["value"]


# --- argument handling -----------------------------------------------------------

class _InputError(Exception):
    def __init__(self, flag: str, message: str):
        self.flag = flag
        super().__init__(f"{flag}: {message}")


def _split_vars(text: str) -> tuple:
    names = tuple(v.strip() for v in text.split(",") if v.strip())
    if not names:
        raise _InputError("--vars", "no variables given")
    try:
        PolyRing(2, names)
    except ValueError as exc:
        raise _InputError("--vars", str(exc)) from None
    return names


def _parse_prime(value) -> int:
    try:
        p = int(value)
        BracketLevel(p, 1)
    except (TypeError, ValueError):
        raise _InputError("--prime", f"{value!r} is not a prime") from None
    return p


def _build_pair(args) -> IdealPair:
    p = _parse_prime(args.prime)
    variables = _split_vars(args.vars)
    ring = PolyRing(p, variables)
    texts = [t for t in args.gens.split(";") if t.strip()]
    if not texts:
        raise _InputError("--gens", "no generators given")
    gens = []
    for t in texts:
        try:
            gens.append(parse_poly(t, variables, p))
        except (FPTError, ValueError) as exc:
            raise _InputError("--gens", f"{t.strip()!r}: {exc}") from None
    mult = None
    if args.multiplier:
        try:
            mult = parse_poly(args.multiplier, variables, p)
        except (FPTError, ValueError) as exc:
            raise _InputError("--multiplier", str(exc)) from None
    try:
        return IdealPair(ring, tuple(gens), mult)
    except ValueError as exc:
        flag = "--multiplier" if "multiplier" in str(exc) else "--gens"
        raise _InputError(flag, str(exc)) from None


def _nu_report(pair: IdealPair, seq, iv, guess) -> dict:
    return {
        "version": JSON_VERSION,
        "prime": pair.p,
        "vars": list(pair.ring.variables),
        "pair": {
            "gens": [g.to_text() for g in pair.gens],
            "multiplier": pair.multiplier.to_text() if pair.multiplier is not None else None,
        },
        "levels": [record_to_json(r) for r in seq.records],
        "bounds": None if iv is None else {"lower": frac(iv.lower), "upper": frac(iv.upper)},
        "conjecture": None if guess is None else {"limit": frac(guess.limit),
                                                  "confirmed_steps": guess.confirmed_steps},
    }


def cmd_nu(args) -> int:
    pair = _build_pair(args)
    E = args.e if args.e is not None else default_levels(pair.p)
    if E < 1:
        raise _InputError("--e", "level budget must be >= 1")
    cache = None if args.no_cache else NuFileCache(default_cache_dir())
    try:
        seq = nu_sequence(pair, E, cache=cache)
    except ResourceLimit as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        if exc.partial is not None:
            for r in exc.partial.records:
                print(f"  finished e={r.e} q={r.q} nu={r.nu}", file=sys.stderr)
        return 4
    if args.verify_cache and cache is not None:
        fresh = nu_sequence(pair, E)
        if fresh.records != seq.records:
            print("cache mismatch: cached records differ from recomputation", file=sys.stderr)
            return 1
    try:
        iv = bounds(seq)
    except AllLevelsNotFPure:
        iv = None
    guess = conjecture(seq)
    report = _nu_report(pair, seq, iv, guess)
    if args.json:
        print(json.dumps(report, sort_keys=True))
    else:
        print(f"pair: {pair.describe()} over F_{pair.p}")
        for r in seq.records:
            nu = "NOT_F_PURE_AT_LEVEL" if r.nu is None else r.nu
            line = f"e={r.e} q={r.q} nu={nu}"
            if args.explain and r.witness is not None:
                line += f" witness={tuple(r.witness)}"
            print(line)
        if iv is None:
            print("bounds: none (not F-pure at any tested level)")
        else:
            print(f"bounds: [{frac(iv.lower)}, {frac(iv.upper)}]")
            if args.explain:
                print(f"  lower = nu/q at e={iv.lower_level}; upper = (nu+1+mu)/q at e={iv.upper_level}, mu={pair.mu}")
        if guess is None:
            print("conjecture: none")
        else:
            print(f"conjecture: {frac(guess.limit)} ({guess.status}, confirmed_steps={guess.confirmed_steps})")
    return 3 if iv is None else 0


def _parse_monomials(text: str, variables: tuple) -> MonomialIdeal:
    gens = []
    for t in (s for s in text.split(",") if s.strip()):
        try:
            f = parse_poly(t, variables, 2**31 - 1)
        except (FPTError, ValueError) as exc:
            raise _InputError("--gens", f"{t.strip()!r}: {exc}") from None
        if not f.is_monomial() or next(iter(f.terms.values())) != 1:
            raise _InputError("--gens", f"{t.strip()!r} is not a pure monomial")
        gens.append(next(iter(f.terms)))
    if not gens:
        raise _InputError("--gens", "no generators given")
    try:
        return MonomialIdeal(len(variables), gens)
    except ValueError as exc:
        raise _InputError("--gens", str(exc)) from None


def _monomial_text(u: Sequence[int], variables: tuple) -> str:
    parts = [n if x == 1 else f"{n}^{x}" for n, x in zip(variables, u) if x]
    return "*".join(parts) or "1"


def cmd_monomial(args) -> int:
    variables = _split_vars(args.vars)
    a = _parse_monomials(args.gens, variables)
    if args.what == "fpt":
        result = frac(fpt_lp(a))
    elif args.what == "closure":
        result = [_monomial_text(g, variables) for g in integral_closure(a).gens]
    elif args.what == "height":
        result = height(a)
    else:
        try:
            result = multiplicity(a, variables=variables)
        except NotMPrimary as exc:
            raise _InputError("--gens", str(exc)) from None
        except ResourceLimit as exc:
            print(f"resource limit: {exc}", file=sys.stderr)
            return 4
    if args.json:
        print(json.dumps({"version": JSON_VERSION, "vars": list(variables), "what": args.what, "result": result},
                         sort_keys=True))
    elif isinstance(result, list):
        print(", ".join(result))
    else:
        print(result)
    return 0


def cmd_suite(args) -> int:
    primes = None
    if args.primes:
        try:
            primes = tuple(_parse_prime(x) for x in args.primes.split(","))
        except _InputError:
            raise _InputError("--primes", f"{args.primes!r} is not a comma-separated list of primes") from None
    if args.e is not None and args.e < 1:
        raise _InputError("--e", "level budget must be >= 1")
    try:
        spec = SuiteSpec(args.name, primes=primes, e_budget=args.e, seed=args.seed, cases=args.cases)
    except ValueError as exc:
        raise _InputError("--seed", str(exc)) from None
    report = run_suite(spec)
    sys.stdout.write(report.transcript())
    print(report.summary())
    if args.golden == "write":
        path = write_golden(report)
        print(f"golden transcript written to {path}")
    elif args.golden == "check":
        if not check_golden(report):
            print("golden transcript mismatch", file=sys.stderr)
            return 1
    if report.resource_limited:
        return 4
    return 0 if report.passed else 1


# --- parser and config ---------------------------------------------------------

_BOOL_FLAGS = {"json", "explain", "no_cache", "verify_cache"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fpt", description="Exact F-pure threshold computations over F_p.")
    parser.add_argument("--version", action="version", version=f"fpt {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    nu = sub.add_parser("nu", help="nu values, bounds and a conjectured limit for an ideal pair")
    nu.add_argument("--config", metavar="FILE", help="key=value lines supplying flag values")
    nu.add_argument("--prime", required=True)
    nu.add_argument("--vars", required=True, help="comma-separated variable names")
    nu.add_argument("--gens", required=True, help="';'-separated generator polynomials")
    nu.add_argument("--multiplier", help="hypersurface f (computes in F_p[vars]/(f))")
    nu.add_argument("--e", type=int, help="number of Frobenius levels (default 3 for p <= 7, else 2)")
    nu.add_argument("--json", action="store_true")
    nu.add_argument("--explain", action="store_true", help="show witness tuples and bound provenance")
    nu.add_argument("--no-cache", dest="no_cache", action="store_true")
    nu.add_argument("--verify-cache", dest="verify_cache", action="store_true",
                    help="recompute and compare against cached records")
    nu.set_defaults(func=cmd_nu)

    mono = sub.add_parser("monomial", help="exact computations for monomial ideals")
    mono.add_argument("--config", metavar="FILE")
    mono.add_argument("--vars", required=True)
    mono.add_argument("--gens", required=True, help="','-separated monomials, e.g. \"X^2,Y^3\"")
    mono.add_argument("--what", required=True, choices=("fpt", "closure", "height", "mult"))
    mono.add_argument("--json", action="store_true")
    mono.set_defaults(func=cmd_monomial)

    suite = sub.add_parser("suite", help="run a named verification suite")
    suite.add_argument("--config", metavar="FILE")
    suite.add_argument("--name", required=True, choices=SUITES)
    suite.add_argument("--seed", type=int, default=0)
    suite.add_argument("--primes")
    suite.add_argument("--e", type=int)
    suite.add_argument("--cases", type=int, help="override the number of random cases")
    suite.add_argument("--golden", choices=("write", "check"))
    suite.set_defaults(func=cmd_suite)
    return parser


def _expand_config(argv: list) -> list:
    """Insert flags from ``--config FILE`` right after the subcommand, so flags
    given explicitly on the command line still win."""
    if "--config" not in argv and not any(a.startswith("--config=") for a in argv):
        return argv
    path = None
    rest = []
    i = 0
    while i < len(argv):
        a = argv[i]
        if a == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
            i += 2
            continue
        if a.startswith("--config="):
            path = a.split("=", 1)[1]
            i += 1
            continue
        rest.append(a)
        i += 1
    if path is None:
        return argv
    extra = []
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise _InputError("--config", str(exc)) from None
    for n, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise _InputError("--config", f"line {n}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        flag = "--" + key.replace("_", "-")
        if key in _BOOL_FLAGS:
            if value.lower() in ("1", "true", "yes", "on"):
                extra.append(flag)
        else:
            extra += [flag, value]
    if not rest:
        return extra
    return rest[:1] + extra + rest[1:]


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _expand_config(argv)
    except _InputError as exc:
        parser.error(str(exc))
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _InputError as exc:
        parser.error(str(exc))  # exits with status 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
