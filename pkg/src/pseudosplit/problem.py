"""Problem files: named groups, algebras, setups, fans and families plus a job list.

Everything referenced by a job is built and validated when the file is
parsed, so a problem that parses runs without structural surprises.  Jobs
then execute independently; a failing job is recorded in the report and the
rest carry on.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from . import __version__
from .etale import EtaleAlgebraDescriptor, component_degrees, covered_by_conjugates, is_pseudo_split, is_split
from .fans import (
    DEFAULT_HEIGHT_CAP,
    FanError,
    FanMorphism,
    SmoothKatoFan,
    barycentric_subdivision,
    enumerate_points,
    height_bound_m,
    iterated_barycentric,
    star_subdivision,
    validate_smooth_fan,
)
from .frobenian import (
    GaloisSetup,
    delta,
    density_s_eq_1,
    fraction_str,
    mean,
    predict_surjectivity,
    s_profile,
    s_value,
    surjectivity_set,
)
from .oracle import OracleError, PolynomialFamily, compare_with_prediction, empirical_density, has_qp_root
from .perm_core import DEFAULT_ORDER_CAP, GroupAction, GroupError, Permutation, PermutationGroup, SubgroupHandle

SCHEMA = "pseudosplit.report/1"


class ProblemError(ValueError):
    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


# command -> (required args, optional args)
COMMANDS: dict[str, tuple[tuple[str, ...], tuple[str, ...]]] = {
    "pseudosplit": (("algebra",), ()),
    "split": (("algebra",), ()),
    "s-profile": (("setup",), ()),
    "density-s1": (("setup",), ()),
    "delta": (("setup",), ()),
    "predict-surjectivity": (("setups", "lambda_class"), ("lambda",)),
    "surjectivity-set": (("setups",), ("lambda",)),
    "fan-validate": (("fan",), ()),
    "fan-subdivide": (("fan",), ("kind", "cone", "m")),
    "fan-points": (("fan", "max_height"), ()),
    "height-bound-m": (("morphism",), ("cap",)),
    "oracle-root": (("family", "prime"), ()),
    "oracle-density": (("family", "lower", "upper"), ("workers",)),
    "oracle-compare": (("family", "predicted", "lower", "upper", "tolerance"), ("workers",)),
}

# argument name -> section its value refers to
_REFS = {"algebra": "algebras", "setup": "setups", "fan": "fans", "morphism": "morphisms",
         "family": "families", "lambda": "groups"}


@dataclass
class ProblemFile:
    groups: dict[str, PermutationGroup] = field(default_factory=dict)
    algebras: dict[str, EtaleAlgebraDescriptor] = field(default_factory=dict)
    setups: dict[str, GaloisSetup] = field(default_factory=dict)
    fans: dict[str, SmoothKatoFan] = field(default_factory=dict)
    morphisms: dict[str, FanMorphism] = field(default_factory=dict)
    families: dict[str, PolynomialFamily] = field(default_factory=dict)
    jobs: list[dict] = field(default_factory=list)
    cap_height: int = DEFAULT_HEIGHT_CAP


def _perm(raw: Any, degree: int, where: str) -> Permutation:
    if not isinstance(raw, list) or not all(isinstance(i, int) for i in raw):
        raise ProblemError(where, f"expected a permutation as an image array, got {raw!r}")
    if len(raw) != degree:
        raise ProblemError(where, f"permutation {raw} should have degree {degree}")
    try:
        return Permutation(tuple(raw))
    except GroupError as e:
        raise ProblemError(where, str(e)) from None


def _group(raw: Any, where: str, cap: int) -> PermutationGroup:
    if not isinstance(raw, dict) or "degree" not in raw:
        raise ProblemError(where, "a group needs 'degree' and 'generators'")
    deg = raw["degree"]
    gens = [_perm(g, deg, f"{where}.generators[{k}]") for k, g in enumerate(raw.get("generators", []))]
    try:
        grp = PermutationGroup(deg, gens, cap=cap)
        grp.elements  # apply the order cap now
    except GroupError as e:
        raise ProblemError(where, str(e)) from None
    return grp


def _element(raw: Any, group: PermutationGroup, where: str) -> Permutation:
    """A group element given as an image array or as an index into the generators."""
    if isinstance(raw, int):
        if not 0 <= raw < len(group.generators):
            raise ProblemError(where, f"generator index {raw} out of range")
        return group.generators[raw]
    p = _perm(raw, group.degree, where)
    if p not in group:
        raise ProblemError(where, f"{raw} is not an element of the group")
    return p


def _subgroup(raw: Any, group: PermutationGroup, where: str) -> SubgroupHandle:
    if not isinstance(raw, list):
        raise ProblemError(where, "a subgroup is a list of generators (indices or image arrays)")
    return SubgroupHandle(group, [_element(x, group, f"{where}[{k}]") for k, x in enumerate(raw)])


def _lookup(table: dict, name: Any, where: str, what: str):
    if not isinstance(name, str) or name not in table:
        raise ProblemError(where, f"unresolved {what} reference {name!r}")
    return table[name]


def _group_ref(raw: Any, pf: ProblemFile, where: str, cap: int) -> PermutationGroup:
    if isinstance(raw, dict):
        return _group(raw, where, cap)
    return _lookup(pf.groups, raw, where, "group")


def _setup(raw: dict, pf: ProblemFile, where: str, cap: int) -> GaloisSetup:
    label = raw.get("label")
    try:
        if "from_algebra" in raw:
            alg = _lookup(pf.algebras, raw["from_algebra"], f"{where}.from_algebra", "algebra")
            return GaloisSetup.from_algebra(alg, label)
        for key in ("lambda", "gamma", "G", "N", "quotient"):
            if key not in raw:
                raise ProblemError(where, f"missing '{key}'")
        lam = _group_ref(raw["lambda"], pf, f"{where}.lambda", cap)
        g = _group_ref(raw["G"], pf, f"{where}.G", cap)
        gamma = _subgroup(raw["gamma"], lam, f"{where}.gamma")
        n = _subgroup(raw["N"], g, f"{where}.N")
        quot = [_element(x, lam, f"{where}.quotient[{k}]") for k, x in enumerate(raw["quotient"])]
        images = raw.get("fiber_action", [])
        size = raw.get("fiber_size")
        if size is None:
            if not images:
                raise ProblemError(where, "give 'fiber_size' when 'fiber_action' is empty")
            size = len(images[0])
        if size == 0:
            fiber = None
        else:
            perms = [_perm(x, size, f"{where}.fiber_action[{k}]") for k, x in enumerate(images)]
            fiber = GroupAction(g, size, tuple(perms))
        return GaloisSetup(lam, gamma, g, n, quot, fiber, label)
    except GroupError as e:
        raise ProblemError(where, str(e)) from None


def _check_job(job: Any, pf: ProblemFile, where: str) -> dict:
    if not isinstance(job, dict) or "command" not in job:
        raise ProblemError(where, "a job needs a 'command'")
    cmd = job["command"]
    if cmd not in COMMANDS:
        raise ProblemError(where, f"unknown command {cmd!r}")
    required, optional = COMMANDS[cmd]
    for key in required:
        if key not in job:
            raise ProblemError(where, f"{cmd} needs '{key}'")
    extra = set(job) - set(required) - set(optional) - {"command", "label"}
    if extra:
        raise ProblemError(where, f"{cmd} does not take {sorted(extra)}")
    for key, section in _REFS.items():
        if key in job:
            _lookup(getattr(pf, section), job[key], f"{where}.{key}", key)
    if "setups" in job:
        if not isinstance(job["setups"], list):
            raise ProblemError(f"{where}.setups", "expected a list of setup names")
        for k, name in enumerate(job["setups"]):
            _lookup(pf.setups, name, f"{where}.setups[{k}]", "setup")
    if cmd == "oracle-compare" and isinstance(job["predicted"], dict):
        _lookup(pf.setups, job["predicted"].get("mean_of"), f"{where}.predicted.mean_of", "setup")
    return job


def parse_problem(data: dict, cap_group_order: int = DEFAULT_ORDER_CAP,
                  cap_height: int = DEFAULT_HEIGHT_CAP) -> ProblemFile:
    try:
        return _parse(data, cap_group_order, cap_height)
    except ProblemError:
        raise
    except (TypeError, AttributeError, KeyError, ValueError) as e:
        # wrong shapes deep inside an entry; the message is still specific
        raise ProblemError("<root>", f"malformed problem data ({type(e).__name__}: {e})") from None


def _parse(data: dict, cap_group_order: int, cap_height: int) -> ProblemFile:
    if not isinstance(data, dict):
        raise ProblemError("<root>", "a problem file is a JSON object")
    known = {"groups", "algebras", "setups", "fans", "morphisms", "families", "jobs", "description"}
    extra = set(data) - known
    if extra:
        raise ProblemError("<root>", f"unknown sections {sorted(extra)}")
    pf = ProblemFile(cap_height=cap_height)
    cap = cap_group_order
    for name, raw in data.get("groups", {}).items():
        pf.groups[name] = _group(raw, f"groups.{name}", cap)
    for name, raw in data.get("algebras", {}).items():
        where = f"algebras.{name}"
        grp = _group_ref(raw.get("group"), pf, f"{where}.group", cap)
        comps = raw.get("components")
        if not isinstance(comps, list) or not comps:
            raise ProblemError(where, "an algebra needs a nonempty 'components' list")
        subs = [_subgroup(c, grp, f"{where}.components[{k}]") for k, c in enumerate(comps)]
        pf.algebras[name] = EtaleAlgebraDescriptor(grp, subs)
    for name, raw in data.get("setups", {}).items():
        pf.setups[name] = _setup(raw, pf, f"setups.{name}", cap)
    for name, raw in data.get("fans", {}).items():
        where = f"fans.{name}"
        try:
            fan = SmoothKatoFan(raw["dim"], raw["rays"], raw["cones"])
        except (KeyError, TypeError) as e:
            raise ProblemError(where, f"a fan needs 'dim', 'rays' and 'cones' ({e})") from None
        except FanError as e:
            raise ProblemError(where, str(e)) from None
        check = validate_smooth_fan(fan)
        if not check.valid:
            raise ProblemError(where, "invalid smooth fan: " + "; ".join(check.violations))
        pf.fans[name] = fan
    for name, raw in data.get("morphisms", {}).items():
        where = f"morphisms.{name}"
        src = _lookup(pf.fans, raw.get("source"), f"{where}.source", "fan")
        tgt = _lookup(pf.fans, raw.get("target"), f"{where}.target", "fan")
        try:
            pf.morphisms[name] = FanMorphism.from_matrices(src, tgt, raw["cone_map"], raw["matrices"])
        except KeyError as e:
            raise ProblemError(where, f"missing {e}") from None
        except FanError as e:
            raise ProblemError(where, str(e)) from None
    for name, raw in data.get("families", {}).items():
        members = raw.get("members") if isinstance(raw, dict) else raw
        try:
            pf.families[name] = PolynomialFamily(members or [])
        except OracleError as e:
            raise ProblemError(f"families.{name}", str(e)) from None
    jobs = data.get("jobs", [])
    if not isinstance(jobs, list):
        raise ProblemError("jobs", "expected a list")
    pf.jobs = [_check_job(j, pf, f"jobs[{k}]") for k, j in enumerate(jobs)]
    return pf


def parse_problem_file(path: str | Path, cap_group_order: int = DEFAULT_ORDER_CAP,
                       cap_height: int = DEFAULT_HEIGHT_CAP) -> ProblemFile:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ProblemError(str(path), f"malformed JSON at line {e.lineno}: {e.msg}") from None
    return parse_problem(data, cap_group_order, cap_height)


# --- job execution ----------------------------------------------------------

def _strata(pf: ProblemFile, job: dict) -> tuple[list[GaloisSetup], PermutationGroup | None]:
    strata = [pf.setups[name] for name in job["setups"]]
    lam = pf.groups[job["lambda"]] if "lambda" in job else None
    return strata, lam


def _run_job(pf: ProblemFile, job: dict) -> dict:
    cmd = job["command"]
    if cmd in ("pseudosplit", "split"):
        alg = pf.algebras[job["algebra"]]
        out = {"degrees": component_degrees(alg), "dimension": alg.dimension}
        if cmd == "split":
            out["split"] = is_split(alg)
            return out
        rep = is_pseudo_split(alg)
        if rep.is_pseudo_split != covered_by_conjugates(alg):
            raise AssertionError("fixed-point and covering routes disagree")
        out.update(rep.to_json())
        return out
    if cmd == "s-profile":
        prof = s_profile(pf.setups[job["setup"]])
        out = prof.to_json()
        out["mean"] = fraction_str(mean(prof.values))
        return out
    if cmd == "density-s1":
        return {"density": fraction_str(density_s_eq_1(pf.setups[job["setup"]]))}
    if cmd == "delta":
        return {"delta": fraction_str(delta(pf.setups[job["setup"]]))}
    if cmd == "predict-surjectivity":
        strata, lam = _strata(pf, job)
        amb = lam if lam is not None else (strata[0].lam if strata else None)
        if amb is None:
            raise ValueError("give 'lambda' when there are no strata")
        elt = _element(job["lambda_class"], amb, "lambda_class")
        return {"surjective": predict_surjectivity(strata, elt, lam),
                "per_stratum": [{"setup": name, "s": fraction_str(s_value(st, elt))}
                                for name, st in zip(job["setups"], strata)]}
    if cmd == "surjectivity-set":
        strata, lam = _strata(pf, job)
        reps, dens = surjectivity_set(strata, lam)
        return {"classes": [r.to_list() for r in reps], "density": fraction_str(dens)}
    if cmd == "fan-validate":
        fan = pf.fans[job["fan"]]
        out = validate_smooth_fan(fan).to_json()
        out.update(rays=len(fan.rays), maximal_cones=len(fan.maximal_cones))
        return out
    if cmd == "fan-subdivide":
        fan = pf.fans[job["fan"]]
        kind = job.get("kind", "barycentric")
        if kind == "barycentric":
            sub = barycentric_subdivision(fan)
        elif kind == "star":
            sub = star_subdivision(fan, job["cone"])
        elif kind == "iterated":
            sub = iterated_barycentric(fan, int(job["m"]))
        else:
            raise ValueError(f"unknown subdivision kind {kind!r}")
        out = sub.to_json()
        out["valid"] = validate_smooth_fan(sub.refined).valid
        return out
    if cmd == "fan-points":
        pts = enumerate_points(pf.fans[job["fan"]], int(job["max_height"]))
        return {"count": len(pts), "points": [dict(p.to_json(), height=p.height) for p in pts]}
    if cmd == "height-bound-m":
        return height_bound_m(pf.morphisms[job["morphism"]], int(job.get("cap", pf.cap_height))).to_json()
    if cmd == "oracle-root":
        p = int(job["prime"])
        return {"prime": p, "has_root": has_qp_root(pf.families[job["family"]], p)}
    if cmd == "oracle-density":
        return empirical_density(pf.families[job["family"]], int(job["lower"]), int(job["upper"]),
                                 int(job.get("workers", 1))).to_json()
    if cmd == "oracle-compare":
        pred = job["predicted"]
        if isinstance(pred, dict):
            predicted = mean(s_profile(pf.setups[pred["mean_of"]]).values)
        else:
            predicted = Fraction(str(pred))
        return compare_with_prediction(pf.families[job["family"]], predicted, int(job["lower"]),
                                       int(job["upper"]), float(job["tolerance"]),
                                       int(job.get("workers", 1))).to_json()
    raise ValueError(f"unknown command {cmd!r}")


def run_job(pf: ProblemFile, index: int) -> dict:
    job = pf.jobs[index]
    entry: dict[str, Any] = {"index": index, "command": job["command"],
                             "args": {k: v for k, v in job.items() if k != "command"}}
    try:
        entry["result"] = _run_job(pf, job)
        entry["status"] = "ok"
    except (ValueError, ArithmeticError, AssertionError, KeyError) as e:
        entry["status"] = "error"
        entry["error"] = f"{type(e).__name__}: {e}"
    return entry


def run(pf: ProblemFile, jobs: int = 1) -> dict:
    idx = range(len(pf.jobs))
    if jobs > 1 and len(pf.jobs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            entries = list(ex.map(run_job, [pf] * len(pf.jobs), idx))
    else:
        entries = [run_job(pf, i) for i in idx]
    return {"schema": SCHEMA, "version": __version__, "jobs": entries}


def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


def render_text(report: dict) -> str:
    lines = [f"# {report['schema']} (pseudosplit {report['version']})"]
    for e in report["jobs"]:
        head = f"[{e['index']}] {e['command']}"
        ref = next((f" {v}" for k, v in e["args"].items() if isinstance(v, str)), "")
        if e["status"] != "ok":
            lines.append(f"{head}{ref}: ERROR {e['error']}")
            continue
        lines.append(f"{head}{ref}: {_summary(e['command'], e['result'])}")
    return "\n".join(lines) + "\n"


def _summary(cmd: str, r: dict) -> str:
    if cmd == "pseudosplit":
        return f"split={r['split']} pseudo_split={r['pseudo_split']} degrees={r['degrees']}"
    if cmd == "split":
        return f"split={r['split']} degrees={r['degrees']}"
    if cmd == "s-profile":
        vals = " ".join(c["s"] for c in r["classes"])
        return f"s=[{vals}] mean={r['mean']}"
    if cmd in ("density-s1", "delta"):
        return next(iter(r.values()))
    if cmd == "predict-surjectivity":
        return f"surjective={r['surjective']}"
    if cmd == "surjectivity-set":
        return f"{len(r['classes'])} classes, density {r['density']}"
    if cmd == "fan-validate":
        return f"valid={r['valid']}"
    if cmd == "fan-subdivide":
        return f"{len(r['refined']['rays'])} rays, {len(r['refined']['cones'])} maximal cones, valid={r['valid']}"
    if cmd == "fan-points":
        return f"{r['count']} points"
    if cmd == "height-bound-m":
        return f"m={r['m']} complete={r['complete']}"
    if cmd == "oracle-root":
        return f"p={r['prime']} has_root={r['has_root']}"
    if cmd == "oracle-density":
        return f"{r['successes']}/{r['good_primes']} good primes = {r['ratio_decimal']}"
    if cmd == "oracle-compare":
        return f"estimate={r['estimate']['ratio_decimal']} predicted={r['predicted']} pass={r['pass']}"
    return json.dumps(r)
