"""Command line front end.

    extlie construct --case e8-d5 --out e8d5.json
    extlie verify --case a2-coxeter --mode full
    extlie fold --case D4G2
    extlie descend --case G2Q
    extlie rep --case e8-d5
    extlie prop-check --spec my_case.toml

Exit status: 0 when every check passes, 1 on a failed check, 2 on a bad spec.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ExtLieError, InvalidSpec

SCHEMA = 1
COMMANDS = ("construct", "verify", "fold", "descend", "rep", "prop-check")
AUT_KINDS = ("coxeter_power", "matrix", "word", "minus_identity", "diagram")
TOP_KEYS = {"name", "description", "command", "lattice", "automorphism", "epsilon",
            "cocycle", "fold", "descend", "verify", "rep"}
VERIFY_KEYS = {"mode", "seed", "samples", "pair_samples", "killing"}
REP_KEYS = {"central_exp", "samples"}
AUT_KEYS = {"kind", "word", "power", "rows", "perm"}


# ---------------------------------------------------------------------------
# job specs


@dataclass
class JobSpec:
    command: str
    name: str = ""
    description: str = ""
    lattice: str | None = None
    automorphism: dict | None = None
    epsilon: str = "eps_w"
    cocycle: str = "snf"
    fold: str | None = None
    descend: str | None = None
    mode: str = "full"
    seed: int = 42
    samples: int = 10 ** 6
    pair_samples: int = 10 ** 4
    killing: bool = True
    central_exp: int = 1
    rep_samples: int = 10 ** 4

    def to_dict(self) -> dict:
        out = {"command": self.command, "name": self.name, "epsilon": self.epsilon,
               "cocycle": self.cocycle,
               "verify": {"mode": self.mode, "seed": self.seed, "samples": self.samples,
                          "pair_samples": self.pair_samples, "killing": self.killing},
               "rep": {"central_exp": self.central_exp, "samples": self.rep_samples}}
        for key in ("description", "lattice", "automorphism", "fold", "descend"):
            val = getattr(self, key)
            if val:
                out[key] = val
        return out


def _check_keys(d: dict, allowed: set, where: str) -> None:
    if not isinstance(d, dict):
        raise InvalidSpec(f"{where} must be a table")
    unknown = sorted(set(d) - allowed)
    if unknown:
        raise InvalidSpec(f"unknown key(s) in {where}: {', '.join(unknown)}")


def _int(v, where: str, lo: int | None = None) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise InvalidSpec(f"{where} must be an integer")
    if lo is not None and v < lo:
        raise InvalidSpec(f"{where} must be at least {lo}")
    return v


def parse_spec(raw: dict, command: str | None = None) -> JobSpec:
    """Validate a spec table; ``command`` overrides the one in the table."""
    from .epsilon import KINDS
    from .folding import FOLDING_CASES
    _check_keys(raw, TOP_KEYS, "spec")
    cmd = command or raw.get("command")
    if cmd not in COMMANDS:
        raise InvalidSpec(f"unknown command {cmd!r}")
    job = JobSpec(cmd, name=str(raw.get("name", "")), description=str(raw.get("description", "")))
    for key in ("fold", "descend"):
        if key in raw:
            setattr(job, key, str(raw[key]).split(":")[-1])
    if job.fold is not None and job.fold not in FOLDING_CASES:
        raise InvalidSpec(f"unknown folding case {job.fold!r}")
    if job.descend is not None and job.descend != "G2Q":
        raise InvalidSpec(f"unknown descent case {job.descend!r}")
    if "lattice" in raw:
        if not isinstance(raw["lattice"], str):
            raise InvalidSpec("lattice must be a string")
        job.lattice = raw["lattice"]
    if "automorphism" in raw:
        aut = raw["automorphism"]
        _check_keys(aut, AUT_KEYS, "automorphism")
        if aut.get("kind") not in AUT_KINDS:
            raise InvalidSpec(f"unknown automorphism kind {aut.get('kind')!r}")
        need = {"coxeter_power": ("word", "power"), "matrix": ("rows",), "word": ("word",),
                "minus_identity": (), "diagram": ("perm",)}[aut["kind"]]
        for k in need:
            if k not in aut:
                raise InvalidSpec(f"automorphism kind {aut['kind']} needs {k!r}")
        job.automorphism = dict(aut)
    job.epsilon = raw.get("epsilon", "eps_w")
    if job.epsilon not in KINDS:
        raise InvalidSpec(f"unknown epsilon kind {job.epsilon!r}")
    job.cocycle = raw.get("cocycle", "snf")
    if job.cocycle not in ("snf", "trivial"):
        raise InvalidSpec(f"unknown cocycle option {job.cocycle!r}")
    ver = raw.get("verify", {})
    _check_keys(ver, VERIFY_KEYS, "verify")
    job.mode = ver.get("mode", "full")
    if job.mode not in ("full", "sampled"):
        raise InvalidSpec(f"unknown mode {job.mode!r}")
    job.seed = _int(ver.get("seed", 42), "verify.seed", 0)
    job.samples = _int(ver.get("samples", 10 ** 6), "verify.samples", 1)
    job.pair_samples = _int(ver.get("pair_samples", 10 ** 4), "verify.pair_samples", 1)
    job.killing = bool(ver.get("killing", True))
    rep = raw.get("rep", {})
    _check_keys(rep, REP_KEYS, "rep")
    job.central_exp = _int(rep.get("central_exp", 1), "rep.central_exp", 1)
    job.rep_samples = _int(rep.get("samples", 10 ** 4), "rep.samples", 1)
    if cmd in ("construct", "verify", "rep", "prop-check") and job.fold is None and job.descend is None:
        if job.lattice is None or job.automorphism is None:
            raise InvalidSpec(f"{cmd} needs lattice and automorphism")
    if cmd == "fold" and job.fold is None:
        raise InvalidSpec("fold needs a folding case")
    if cmd == "descend" and job.descend is None:
        raise InvalidSpec("descend needs a descent case")
    return job


def case_names() -> list[str]:
    root = resources.files("extlie") / "cases"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".toml"))


def load_case(name: str) -> dict:
    """Bundled case by name; ``fold:D4G2``, ``D4G2`` and ``fold-d4g2`` all work."""
    key = name.strip().lower().replace(":", "-")
    names = case_names()
    for cand in (key, "fold-" + key, "descend-" + key):
        if cand in names:
            text = (resources.files("extlie") / "cases" / f"{cand}.toml").read_text()
            return tomllib.loads(text)
    raise InvalidSpec(f"unknown case {name!r}; known: {', '.join(names)}")


def load_spec_file(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise InvalidSpec(f"cannot read spec {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# pipelines


def build_datum(job: JobSpec):
    from .central_ext import build_cocycle
    from .epsilon import make_datum
    from .lattice import aut_special, build_lattice, coinvariants
    L = build_lattice(job.lattice)
    a = job.automorphism
    w = aut_special(L, a["kind"], perm=a.get("perm"), word=a.get("word"),
                    power=a.get("power", 1), rows=a.get("rows"))
    cocycle = None
    if job.cocycle == "trivial":
        cocycle = build_cocycle(coinvariants(L, w), None, w.order)
    return make_datum(L, w, epsilon=job.epsilon, cocycle=cocycle, name=job.name)


def check_job(job: JobSpec) -> None:
    """Build the datum once so malformed lattice data fails as a bad spec."""
    if job.lattice is None:
        return
    try:
        build_datum(job)
    except ExtLieError:
        raise
    except (ValueError, TypeError, IndexError) as exc:
        raise InvalidSpec(f"invalid datum: {exc}") from exc


def _is_coxeter(job: JobSpec) -> bool:
    a = job.automorphism or {}
    return a.get("kind") == "coxeter_power" and a.get("power", 1) == 1


class Checks:
    """Ordered check results; each entry is a dict with an ``ok`` flag."""

    def __init__(self):
        self.items: dict[str, dict] = {}
        self.timings: dict[str, float] = {}

    def add(self, name: str, ok: bool, t0: float | None = None, **info) -> bool:
        self.items[name] = {"ok": bool(ok), **info}
        if t0 is not None:
            self.timings[name] = time.perf_counter() - t0
        return bool(ok)

    @property
    def ok(self) -> bool:
        return all(v["ok"] for v in self.items.values())


def run_construct(job: JobSpec, checks: Checks) -> dict:
    from .lie_algebra import construct
    datum = build_datum(job)
    t0 = time.perf_counter()
    alg = construct(datum)
    L = datum.lattice
    checks.add("dimension", alg.dim == L.rank + len(L.roots), t0, dim=alg.dim)
    dims = alg.grading_dims
    checks.add("grading-dims-sum", sum(dims) == alg.dim, dims=dims)
    return alg.to_json()


def run_verify(job: JobSpec, checks: Checks) -> dict:
    from .central_ext import check_commutator, class_pairing
    from .epsilon import validate_input_datum
    from .lattice import Pairing, is_trivial_pairing, pairing_equality
    from .lie_algebra import (construct, is_nondegenerate, orbits, verify_jacobi,
                              z_bracket_check)
    from .reps import orbit_sum_check
    datum = build_datum(job)
    L, w, c = datum.lattice, datum.w, datum.cocycle

    t0 = time.perf_counter()
    ok, n, wit = pairing_equality(w)
    checks.add("pairing-equality", ok, t0, pairs=n, witness=wit)
    t0 = time.perf_counter()
    if job.cocycle == "snf":
        ok, wit = check_commutator(c, class_pairing(datum.group, Pairing(w)), seed=job.seed)
        checks.add("commutator-matches-pairing", ok, t0,
                   witness=None if wit is None else [list(x) for x in wit])
    t0 = time.perf_counter()
    rep = validate_input_datum(L, w, c, datum.epsilon)
    checks.add("input-datum", rep.ok, t0, **rep.to_json())
    if _is_coxeter(job):
        checks.add("coxeter-pairing-trivial", is_trivial_pairing(w))

    t0 = time.perf_counter()
    alg = construct(datum, validate=False)
    checks.add("dimension", alg.dim == L.rank + len(L.roots), t0, dim=alg.dim)
    t0 = time.perf_counter()
    jr = verify_jacobi(alg, mode=job.mode, count=job.samples, seed=job.seed)
    checks.add("jacobi", jr.ok, t0, **{k: v for k, v in jr.to_json().items()
                                      if k not in ("ok", "backend")})
    t0 = time.perf_counter()
    order = alg.w_tilde.order()
    checks.add("lifted-automorphism-order", order == w.order, t0, order=order)
    hom = alg.w_tilde.is_homomorphism(alg) if job.mode == "full" else None
    if job.mode == "full":
        checks.add("lifted-automorphism-homomorphism", hom is None,
                   witness=None if hom is None else list(hom))
    dims = alg.grading_dims
    checks.add("grading-dims-sum", sum(dims) == alg.dim, dims=dims)
    if job.killing:
        t0 = time.perf_counter()
        checks.add("killing-nondegenerate", is_nondegenerate(alg), t0)

    eligible = (datum.epsilon.kind == "eps_w" and w.elliptic
                and all(len(o) == w.order for o in orbits(w.root_perm)))
    if eligible:
        t0 = time.perf_counter()
        samples = None if job.mode == "full" else job.pair_samples
        zr = z_bracket_check(alg, samples=samples, seed=job.seed)
        checks.add("z-bracket", zr.ok, t0, **{k: v for k, v in zr.to_json().items() if k != "ok"})
        t0 = time.perf_counter()
        # cheap enough to stay exhaustive even in sampled mode
        pr = orbit_sum_check(L, w, seed=job.seed)
        checks.add("orbit-sum-identity", pr.ok, t0,
                   **{k: v for k, v in pr.to_json().items() if k != "ok"})
    return {"dim": alg.dim, "aut_order": w.order, "grading_dims": dims,
            "coinvariants": list(datum.group.invariant_factors), "lattice": L.type_label}


def run_prop_check(job: JobSpec, checks: Checks) -> dict:
    from .reps import orbit_sum_check
    datum = build_datum(job)
    t0 = time.perf_counter()
    samples = None if job.mode == "full" else job.pair_samples
    pr = orbit_sum_check(datum.lattice, datum.w, samples=samples, seed=job.seed)
    checks.add("orbit-sum-identity", pr.ok, t0, **{k: v for k, v in pr.to_json().items() if k != "ok"})
    return pr.to_json()


def run_rep(job: JobSpec, checks: Checks) -> dict:
    from .lie_algebra import construct
    from . import reps as R
    datum = build_datum(job)
    c = datum.cocycle
    t0 = time.perf_counter()
    sub = R.maximal_isotropic(datum.group, c.commutator)
    checks.add("maximal-isotropic", R.is_maximal_isotropic(sub, c.commutator), t0,
               order=sub.order, index=sub.index)
    rep = R.induce(c, sub, job.central_exp)
    t0 = time.perf_counter()
    wit = R.check_homomorphism(rep, job.rep_samples, job.seed)
    checks.add("heisenberg-homomorphism", wit is None, t0, pairs=job.rep_samples,
               witness=None if wit is None else [list(map(list, x)) for x in wit])
    checks.add("central-character", R.central_character_ok(rep))
    t0 = time.perf_counter()
    norm, size = R.character_norm(rep)
    checks.add("heisenberg-irreducible", norm == size, t0, group_order=size)
    alg = construct(datum, validate=False)
    g = R.extend_to_g(alg, rep)
    t0 = time.perf_counter()
    rr = R.verify_rep_homomorphism(g)
    checks.add("rep-homomorphism", rr.ok, t0, **{k: v for k, v in rr.to_json().items() if k != "ok"})
    if rr.commutant_dim is not None:
        checks.add("g-irreducible", rr.commutant_dim == 1, commutant_dim=rr.commutant_dim)
    out = rep.to_json()
    out["g_generators"] = {
        alg.labels[alg.ell + a]: [[(g.z_mats[a].get((i, j))).to_json() if (i, j) in g.z_mats[a] else None
                                   for j in range(rep.dim)] for i in range(rep.dim)]
        for a in g.reps}
    return out


def run_fold(job: JobSpec, checks: Checks) -> dict:
    from .folding import FOLDING_CASES, fold
    case = FOLDING_CASES[job.fold]
    t0 = time.perf_counter()
    res = fold(case)
    for k, v in res.checks.items():
        checks.add(f"fold/{k}", v)
    checks.add("fold-type", res.type == case.expected, t0, type=res.type, expected=case.expected,
               dim=res.dim, length_ratio=res.identification.get("length_ratio"))
    return res.to_json()


def run_descend(job: JobSpec, checks: Checks) -> dict:
    from .folding import descend_g2
    t0 = time.perf_counter()
    res, _ = descend_g2()
    for k, v in res.checks.items():
        checks.add(f"descent/{k}", v)
    checks.add("descent", res.ok, t0, q_dim=res.fixed_dim_q,
               folded_dim=None if res.folded is None else res.folded.dim)
    return res.to_json()


PIPELINES = {"construct": run_construct, "verify": run_verify, "fold": run_fold,
             "descend": run_descend, "rep": run_rep, "prop-check": run_prop_check}


def run(job: JobSpec) -> tuple[int, dict, Checks]:
    """Run ``job``; returns (exit status, artifact, checks)."""
    checks = Checks()
    result = PIPELINES[job.command](job, checks)
    artifact = {"schema": SCHEMA, "command": job.command, "case": job.name,
                "spec": job.to_dict(), "result": result, "checks": checks.items,
                "ok": checks.ok}
    return (0 if checks.ok else 1), artifact, checks


# ---------------------------------------------------------------------------
# output


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def write_atomic(path: str, text: str) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.chmod(tmp, 0o644)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def text_report(job: JobSpec, checks: Checks, status: int) -> str:
    lines = [f"{job.command} {job.name or '(spec)'}"]
    width = max((len(k) for k in checks.items), default=0)
    for name, info in checks.items.items():
        t = checks.timings.get(name)
        extra = f"  {t:.2f}s" if t is not None else ""
        lines.append(f"  {'PASS' if info['ok'] else 'FAIL'}  {name:<{width}}{extra}")
        if not info["ok"]:
            for k, v in sorted(info.items()):
                if k != "ok" and v not in (None, [], {}):
                    lines.append(f"        {k}: {v}")
    lines.append("ok" if status == 0 else "FAILED")
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="extlie", description="Construct and verify graded Lie algebras "
                                "attached to lattice automorphisms.")
    p.add_argument("command", nargs="?", choices=COMMANDS)
    src = p.add_mutually_exclusive_group()
    src.add_argument("--case", help="bundled case name (see --list)")
    src.add_argument("--spec", help="TOML spec file")
    p.add_argument("--list", action="store_true", help="list bundled cases and exit")
    p.add_argument("--out", help="write the JSON artifact here")
    p.add_argument("--mode", choices=("full", "sampled"))
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int)
    p.add_argument("--format", choices=("json", "text"), default="text")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    if args.list:
        print("\n".join(case_names()))
        return 0
    if args.command is None:
        print("error: a command is required", file=sys.stderr)
        return 2
    try:
        if args.case:
            raw = load_case(args.case)
        elif args.spec:
            raw = load_spec_file(args.spec)
        else:
            raise InvalidSpec("one of --case or --spec is required")
        raw = dict(raw)
        raw.pop("command", None)
        if args.mode or args.seed is not None:
            ver = dict(raw.get("verify", {}))
            if args.mode:
                ver["mode"] = args.mode
            if args.seed is not None:
                ver["seed"] = args.seed
            raw["verify"] = ver
        job = parse_spec(raw, args.command)
        check_job(job)
    except ExtLieError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.threads:
        from ._accel import set_threads
        set_threads(args.threads)
    status, artifact, checks = run(job)
    if args.out:
        write_atomic(args.out, dumps(artifact))
    if args.format == "json":
        sys.stdout.write(dumps({"schema": SCHEMA, "command": job.command, "case": job.name,
                                "checks": checks.items, "ok": checks.ok}))
    else:
        sys.stdout.write(text_report(job, checks, status))
    return status


if __name__ == "__main__":
    sys.exit(main())
