"""Subcommand dispatch: config in, module operations, report files out."""

import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np

from .clt import (
    center_observable,
    charfn_gap,
    clt_report,
    loglog_slope,
    mw_statistic,
    sn_star_samples,
    uniform_sum_gap,
)
from .config import SystemSpec, spec_hash
from .coupling import block_tail_stats, paired_sum_gap, pairing_batch, pairing_envelope, verify_p3
from .coupling.pairing import landed_in_arc
from .diagnostics import (
    cesaro_convergence,
    cesaro_profile,
    contraction_certificate,
    default_arcs,
    e_property_profile,
    hitting_parameters,
    minimality_evidence,
    stability_gap,
    uniqueness_evidence,
    with_hitting,
)
from .engine import (
    IFS,
    common_denominator,
    dual_levels,
    dual_mc,
    inverse_system,
    simulate_chain,
    stationary_sample,
    uniformize,
)
from .engine.measure import EmpiricalMeasure
from .engine.observables import Observable
from .engine.streams import derive_seed, set_workers, stream
from .errors import NodeBudgetExceeded, VerdictFailure
from .geometry import validate_homeo
from .measures import ChiMetric, atom_scan, chi_nonexpansiveness, chi_table, invariance_residual, max_gap
from .reports import OutputFormat, ReportEnvelope, to_jsonable, write_report

logger = logging.getLogger(__name__)

SUBCOMMANDS = (
    "validate", "simulate", "stationary", "dual", "eprop", "sync",
    "stability", "unique", "mw", "clt", "couple", "chi",
)


@dataclass
class Result:
    payload: dict[str, Any]
    tables: dict[str, list[dict]] = field(default_factory=dict)
    verdict: str = "ok"


@dataclass
class RunOutcome:
    subcommand: str
    files: list[Path]
    verdict: str
    payload: dict[str, Any]


def _rows(items) -> list[dict]:
    return [to_jsonable(item) for item in items]


def _stationary(spec: SystemSpec, ifs: IFS, count: int, seed: int, tag: str) -> EmpiricalMeasure:
    st = spec.stationary
    return stationary_sample(ifs, st.burn_in, count, st.thinning, derive_seed(seed, tag), st.x0)


def _centered(spec: SystemSpec, ifs: IFS, f: Observable, count: int, seed: int, tag: str) -> tuple[Observable, EmpiricalMeasure]:
    mu = _stationary(spec, ifs, count, seed, f"{tag}:mu")
    check = _stationary(spec, ifs, count, seed, f"{tag}:mu-check")
    return center_observable(f, mu, check), mu


# -- subcommands -----------------------------------------------------------------


def run_validate(spec: SystemSpec, ifs: IFS, seed: int) -> Result:
    grid = spec.budgets.validation_grid
    maps = []
    for i, g in enumerate(ifs.maps):
        report = validate_homeo(g, grid)
        maps.append({"index": i, **to_jsonable(report)})
    observables = []
    for j, f in enumerate(spec.build_observables()):
        passed, observed = f.validate(grid)
        observables.append({
            "index": j, "kind": f.kind, "lipschitz": f.lipschitz, "observed_slope": observed,
            "passed": passed, "sup_norm": f.sup_norm(),
        })
    payload = {"k": ifs.k, "probs": list(ifs.probs), "uniform": ifs.is_uniform, "valid": True}
    return Result(payload, {"maps": maps, "observables": observables})


def run_simulate(spec: SystemSpec, ifs: IFS, seed: int) -> Result:
    cfg = spec.simulate
    path = simulate_chain(ifs, cfg.x0, cfg.n, derive_seed(seed, "simulate"))
    rows = [{"t": t, "x": p.value} for t, p in enumerate(path)]
    return Result({"n": cfg.n, "x0": cfg.x0, "final": path[-1].value}, {"trajectory": rows})


def run_stationary(spec: SystemSpec, ifs: IFS, seed: int) -> Result:
    cfg = spec.stationary
    mu = _stationary(spec, ifs, cfg.count, seed, "stationary")
    gap, arc = max_gap(mu)
    atoms = atom_scan(mu, cfg.atom_window, cfg.atom_threshold)
    means = [mu.expect(f) for f in spec.build_observables()]
    payload = {
        "count": cfg.count,
        "atoms": len(mu),
        "invariance_residual": invariance_residual(ifs, mu, spec.budgets.atom_cap),
        "max_gap": gap,
        "max_gap_arc": list(arc.as_tuple()),
        "atom_evidence": [{"position": p.value, "mass": m} for p, m in atoms],
        "observable_means": means,
        "sampling_scale": 1.0 / math.sqrt(cfg.count),
    }
    return Result(payload, {"measure": mu.to_rows()})


def run_dual(spec: SystemSpec, ifs: IFS, seed: int) -> Result:
    cfg = spec.dual
    f = spec.observable(cfg.observable)
    levels = None
    try:
        levels = dual_levels(ifs, f, [cfg.x], cfg.n, spec.budgets.node_budget)[:, 0]
    except NodeBudgetExceeded as exc:
        logger.info("exact dual skipped (%s); reporting Monte Carlo only", exc)
    estimate, stderr = dual_mc(ifs, f, cfg.x, cfg.n, cfg.samples, derive_seed(seed, "dual"))
    payload = {
        "x": cfg.x,
        "n": cfg.n,
        "exact": None if levels is None else float(levels[-1]),
        "mc_estimate": estimate,
        "mc_stderr": stderr,
    }
    tables = {}
    if levels is not None:
        partial = np.cumsum(levels[1:])
        tables["levels"] = [
            {"d": d, "u_d": float(v), "partial_sum": float(partial[d - 1]) if d else 0.0}
            for d, v in enumerate(levels)
        ]
    return Result(payload, tables)


def run_eprop(spec: SystemSpec, ifs: IFS, seed: int) -> Result:
    cfg = spec.eprop
    f = spec.observable(cfg.observable)
    kwargs = dict(mode=cfg.mode, samples=cfg.samples, seed=derive_seed(seed, "eprop"),
                  node_budget=spec.budgets.node_budget)
    profile = e_property_profile(ifs, f, cfg.x, cfg.deltas, cfg.n_max, **kwargs)
    cesaro = cesaro_profile(ifs, f, cfg.x, cfg.deltas, cfg.n_max, **kwargs)
    payload = {"x": cfg.x, "mode": cfg.mode, "lipschitz": f.lipschitz, "n_max": cfg.n_max}
    return Result(payload, {"profile": _rows(profile), "cesaro": _rows(cesaro)})


def certify(spec: SystemSpec, ifs: IFS, seed: int):
    """Contraction certificate with hitting parameters and stationary half-mass attached."""
    cfg = spec.sync
    arcs = default_arcs(cfg.arc_count, cfg.arc_length)
    cert = contraction_certificate(ifs, arcs, cfg.depth, cfg.trials, derive_seed(seed, "sync:contraction"))
    hitting = hitting_parameters(ifs, cert.arc, cfg.m_max, cfg.x_grid, derive_seed(seed, "sync:hitting"),
                                 spec.budgets.node_budget, cfg.mc_samples)
    mu = _stationary(spec, ifs, cfg.stationary_count, seed, "sync:mu")
    return with_hitting(cert, hitting, mu), hitting


def run_sync(spec: SystemSpec, ifs: IFS, seed: int) -> Result:
    cfg = spec.sync
    cert, hitting = certify(spec, ifs, seed)
    minimality = minimality_evidence(ifs, cfg.minimality_x0, cfg.minimality_depth, cfg.minimality_eps,
                                     spec.budgets.node_budget, seed=derive_seed(seed, "sync:minimality"))
    payload = {
        "certificate": to_jsonable(cert),
        "hitting_exact": hitting.exact,
        "minimality": to_jsonable(minimality),
        "q_ci_excludes_1": cert.q_ci[1] < 1.0,
        "mass_ci_excludes_0": cert.mass_ci[0] > 0.0,
    }
    payload["certificate"].pop("candidates", None)
    verdict = "certified" if minimality.verdict else "certified; minimality evidence below threshold"
    return Result(payload, {"candidates": _rows(cert.candidates)}, verdict)


def run_stability(spec: SystemSpec, ifs: IFS, seed: int) -> Result:
    cfg = spec.stability
    rows = stability_gap(ifs, cfg.x, cfg.y, cfg.n_list, cfg.samples, derive_seed(seed, "stability"))
    last = rows[-1]
    payload = {
        "x": cfg.x,
        "y": cfg.y,
        "samples": cfg.samples,
        "final_w1": last.w1,
        "final_noise_floor": last.noise_floor,
        "below_twice_noise": last.w1 < 2 * last.noise_floor,
    }
    return Result(payload, {"gap": _rows(rows)})


def run_unique(spec: SystemSpec, ifs: IFS, seed: int) -> Result:
    cfg = spec.unique
    evidence = uniqueness_evidence(ifs, cfg.starts, cfg.n, derive_seed(seed, "unique"))
    reference = _stationary(spec, ifs, cfg.stationary_count, seed, "unique:mu")
    cesaro = cesaro_convergence(ifs, cfg.cesaro_x, cfg.cesaro_n_list, cfg.cesaro_samples,
                                derive_seed(seed, "unique:cesaro"), reference)
    payload = {"max_w1": evidence.max_w1, "n": evidence.n, "burn_in": evidence.burn_in}
    return Result(payload, {"pairs": evidence.pairs, "cesaro": _rows(cesaro)})


def run_mw(spec: SystemSpec, ifs: IFS, seed: int) -> Result:
    cfg = spec.mw
    f, mu = _centered(spec, ifs, spec.observable(cfg.observable), cfg.stationary_count, seed, "mw")
    report = mw_statistic(ifs, f, cfg.n_list, cfg.x_count, derive_seed(seed, "mw"), cfg.mode,
                          mu_star=mu, mc_samples=cfg.mc_samples, node_budget=spec.budgets.node_budget)
    gaps = uniform_sum_gap(ifs, f, cfg.x, cfg.y, cfg.n_list, spec.budgets.node_budget)
    half = len(gaps) // 2
    gap_slope = loglog_slope([g["n"] for g in gaps[half:]], [g["gap"] for g in gaps[half:]])
    payload = {
        "mode": report.mode,
        "x_sample_count": report.x_sample_count,
        "beta_growth_hat": report.beta_growth_hat,
        "sum_gap_slope": gap_slope,
        "series_total": report.partial_series[-1],
        "cauchy_ratio": report.cauchy_ratio,
        "centering_offset": f.offset,
        "centering_error": f.centering_error,
    }
    table = [
        {"n": n, "a_n": a, "partial_series": s}
        for n, a, s in zip(report.n_values, report.a_n, report.partial_series)
    ]
    return Result(payload, {"mw": table, "sum_gap": gaps})


def run_clt(spec: SystemSpec, ifs: IFS, seed: int) -> Result:
    cfg = spec.clt
    f, _ = _centered(spec, ifs, spec.observable(cfg.observable), cfg.stationary_count, seed, "clt")
    reports = []
    for n in cfg.n_list:
        for mode, start in (("stationary", "stationary"), ("fixed", cfg.x)):
            samples = sn_star_samples(ifs, f, n, cfg.replicates, cfg.burn_in, start,
                                      derive_seed(seed, f"clt:{mode}:{n}"))
            reports.append(clt_report(samples, n, mode, f.centering_error))
    charfn = []
    if cfg.replicates >= 1000:
        charfn = charfn_gap(ifs, f, cfg.x, cfg.n_list, cfg.t_list, cfg.replicates, derive_seed(seed, "clt:charfn"),
                            cfg.burn_in)
    payload = {
        "replicates": cfg.replicates,
        "centering_offset": f.offset,
        "centering_error": f.centering_error,
        "max_ks_stat": max((r.ks_stat for r in reports if r.ks_stat is not None), default=None),
    }
    return Result(payload, {"clt": _rows(reports), "charfn": _rows(charfn)})


def run_couple(spec: SystemSpec, ifs: IFS, seed: int) -> Result:
    cfg = spec.couple
    denominator = cfg.denominator or common_denominator(ifs.probs)
    uniform = uniformize(ifs, denominator)
    cert, _ = certify(spec, ifs, seed)
    if not 0.0 < cert.q_hat < 1.0:
        raise VerdictFailure(f"contraction rate estimate {cert.q_hat:.4g} is outside (0, 1)")
    m = max(1, cert.m)
    f = spec.observable(cfg.observable)
    if f.lipschitz > 1.0:
        f = f.scaled(1.0 / f.lipschitz)

    transcripts = pairing_batch(uniform, cfg.x, cfg.y, cert.arc, m, cfg.n, cert.q_hat, cfg.replicates,
                                derive_seed(seed, "couple:pairing"), cfg.tail_horizon, cert.alpha_hat,
                                spec.budgets.node_budget)
    checks = [verify_p3(t, uniform, f) for t in transcripts]
    violations = sum(1 for ok, _ in checks if not ok)
    survival = block_tail_stats(transcripts, cert.alpha_hat, cfg.l_max) if len(transcripts) >= 100 else []
    gaps = paired_sum_gap(uniform, f, cfg.x, cfg.y, cfg.n_list, cfg.replicates, derive_seed(seed, "couple:gap"),
                          arc=cert.arc, m=m, q=cert.q_hat, tail_horizon=cfg.tail_horizon,
                          alpha_hat=cert.alpha_hat)
    envelope = pairing_envelope(m, cert.gamma, cert.alpha_hat, f.sup_norm(), cfg.n_list, cfg.beta)
    payload = {
        "denominator": denominator,
        "symbols": uniform.k,
        "arc": list(cert.arc.as_tuple()),
        "m": m,
        "q_hat": cert.q_hat,
        "gamma": cert.gamma,
        "alpha_hat": cert.alpha_hat,
        "transcripts": len(transcripts),
        "bound_violations": violations,
        "worst_bound_ratio": max(r for _, r in checks),
        "coupled_fraction": float(np.mean([t.coupled for t in transcripts])),
        "success_blocks_land_in_arc": all(landed_in_arc(t) for t in transcripts),
        "example_transcript": transcripts[0].to_dict(),
    }
    if violations:
        raise VerdictFailure(f"{violations} of {len(transcripts)} transcripts break the partial-sum bound")
    tables = {"survival": _rows(survival), "paired_gap": _rows(gaps), "envelope": envelope}
    return Result(payload, tables)


def run_chi(spec: SystemSpec, ifs: IFS, seed: int) -> Result:
    cfg = spec.chi
    inverse = inverse_system(ifs)
    base = stationary_sample(inverse, cfg.burn_in, cfg.inverse_count, 1, derive_seed(seed, "chi:mu"))
    chi = ChiMetric(base)
    rng = stream(derive_seed(seed, "chi:pairs"), "chi")
    pairs = [tuple(p) for p in rng.random((cfg.pairs, 2)).tolist()]
    probes = rng.random(cfg.probes).tolist()
    slack = spec.budgets.chi_slack_c / math.sqrt(cfg.inverse_count)
    ok, worst = chi_nonexpansiveness(ifs, chi, probes, pairs, slack)
    minimality = minimality_evidence(inverse, spec.sync.minimality_x0, spec.sync.minimality_depth,
                                     spec.sync.minimality_eps, spec.budgets.node_budget,
                                     seed=derive_seed(seed, "chi:minimality"))
    payload = {
        "inverse_count": cfg.inverse_count,
        "slack": slack,
        "nonexpansive": ok,
        "worst_excess": worst,
        "inverse_minimality": to_jsonable(minimality),
        "max_atom_mass": base.max_atom()[1],
    }
    if not ok:
        raise VerdictFailure(f"|Uf(x) - Uf(y)| exceeds chi(x, y) + {slack:.3g} by {worst - slack:.3g}")
    return Result(payload, {"chi_table": chi_table(chi, pairs)})


HANDLERS: dict[str, Callable[[SystemSpec, IFS, int], Result]] = {
    "validate": run_validate,
    "simulate": run_simulate,
    "stationary": run_stationary,
    "dual": run_dual,
    "eprop": run_eprop,
    "sync": run_sync,
    "stability": run_stability,
    "unique": run_unique,
    "mw": run_mw,
    "clt": run_clt,
    "couple": run_couple,
    "chi": run_chi,
}


def run(subcommand: str, spec: SystemSpec, out_dir: Path, fmt: OutputFormat = "json",
        master_seed: int = 0, workers: Optional[int] = None) -> RunOutcome:
    """Run one subcommand and write its report files."""
    if subcommand not in HANDLERS:
        raise ValueError(f"unknown subcommand {subcommand!r}")
    if workers is not None:
        set_workers(workers)
    started = time.perf_counter()
    ifs = spec.build_ifs()
    result = HANDLERS[subcommand](spec, ifs, master_seed)

    system = spec.model_dump(mode="json", include={"maps", "probs", "observables", "budgets"})
    section = {} if subcommand == "validate" else getattr(spec, subcommand).model_dump(mode="json")
    payload = to_jsonable(dict(result.payload, verdict=result.verdict, tables=result.tables))
    envelope = ReportEnvelope(
        subcommand=subcommand,
        spec_hash=spec_hash(spec),
        master_seed=master_seed,
        config={"system": system, "section": section},
        payload=payload,
    )
    files = write_report(envelope, to_jsonable(result.tables), out_dir, fmt)
    logger.info("%s finished in %.2fs", subcommand, time.perf_counter() - started)
    return RunOutcome(subcommand, files, result.verdict, payload)


def exit_code(exc: Optional[BaseException] = None) -> int:
    """0 for a clean run, 2 for a failed verdict, 1 for anything else."""
    if exc is None:
        return 0
    return 2 if isinstance(exc, VerdictFailure) else 1
