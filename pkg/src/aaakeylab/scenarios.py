"""Scenario models and runners behind the service and the command line.

A scenario is one JSON document describing a source, an intercept
schedule and the outputs wanted; running it yields a per-epoch CSV table
plus a JSON summary, all deterministic for a given seed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .bitcore import gf2_rank
from .eavesdropper import PER_BIT, InterceptSchedule
from .equivocation import (
    capacity,
    eps_bit,
    eps_key_file,
    eps_key_independent,
    markov_eps2,
    markov_eps3,
    markov_eps3_symmetric,
    maurer_bounds,
    mu_hat,
)
from .oracle import (
    OracleConfig,
    exact_equivocation,
    expected_full_row_rank_prob,
    full_row_rank_prob,
    hash_extract,
    mc_equivocation_independent,
    sample_extractor_inputs,
)
from .seeding import STREAM_EXTRACTOR, STREAM_MC, rng_from
from .source import MarkovParams

OutputName = Literal[
    "closed_form", "oracle", "mc", "capacity", "maurer", "extractor", "markov_sweep"
]


def format_number(value: float) -> str:
    """Decimal rendering with 12 significant digits, stable across runs."""
    return "%.12g" % float(value)


def render_csv(header: list[str], rows: list[list[object]]) -> str:
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, bool):
                cells.append(str(int(cell)))
            elif isinstance(cell, float):
                cells.append(format_number(cell))
            else:
                cells.append(str(cell))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def render_json(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


class SourceSpec(BaseModel):
    """What the legitimate parties exchange."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["iid", "markov"] = "iid"
    alphas: Optional[list[float]] = None


class InterceptSpec(BaseModel):
    """Eve's miss probabilities, per cell or per file."""

    model_config = ConfigDict(extra="forbid")

    mode: Literal["per_bit", "per_file"] = "per_bit"
    mu: Union[float, list[float], list[list[float]]]


class Scenario(BaseModel):
    """One runnable configuration; unknown fields are rejected."""

    model_config = ConfigDict(extra="forbid")

    name: str = Field(min_length=1, max_length=64, pattern=r"^[A-Za-z0-9._-]+$")
    source: SourceSpec = Field(default_factory=SourceSpec)
    intercept: InterceptSpec
    L: int = Field(default=1, ge=1, le=4096)
    j: int = Field(ge=1, le=64)
    trials: int = Field(default=100_000, ge=1, le=100_000_000)
    seed: int = Field(default=0, ge=0, lt=2**64)
    outputs: list[OutputName] = Field(default_factory=lambda: ["closed_form", "capacity"])
    extractor_n: int = Field(default=64, ge=1, le=4096)
    sweep_step: float = Field(default=0.01, gt=0.0, le=0.5)

    @model_validator(mode="after")
    def _validate(self) -> "Scenario":
        mu = self.intercept.mu
        if isinstance(mu, (int, float)):
            cell = float(mu)
            if self.intercept.mode == PER_BIT:
                mu = [[cell] * self.j for _ in range(self.L)]
            else:
                mu = [cell] * self.j
        elif mu and isinstance(mu[0], list):
            if self.intercept.mode != PER_BIT:
                raise ValueError("per-file schedules take one value per time step")
            if len(mu) != self.L or any(len(row) != self.j for row in mu):
                raise ValueError(
                    f"per-bit schedule must be L x j = {self.L} x {self.j}, got "
                    f"{len(mu)} row(s) of lengths {sorted({len(r) for r in mu})}"
                )
            mu = [[float(cell) for cell in row] for row in mu]
        else:
            if len(mu) != self.j:
                raise ValueError(f"schedule needs j = {self.j} entries, got {len(mu)}")
            flat = [float(cell) for cell in mu]
            mu = [flat] * self.L if self.intercept.mode == PER_BIT else flat
        flattened = [c for row in mu for c in row] if self.intercept.mode == PER_BIT else mu
        if any(not 0.0 <= c <= 1.0 for c in flattened):
            raise ValueError("miss probabilities must lie in [0, 1]")
        self.intercept.mu = mu

        if self.source.kind == "markov":
            if self.L != 1:
                raise ValueError("a correlated source drives a single key row; set L = 1")
            if self.source.alphas is None or len(self.source.alphas) != self.j - 1:
                got = "none" if self.source.alphas is None else str(len(self.source.alphas))
                raise ValueError(f"a {self.j}-step correlated source needs {self.j - 1} "
                                 f"stay probabilities, got {got}")
            if any(not 0.0 <= a <= 1.0 for a in self.source.alphas):
                raise ValueError("stay probabilities must lie in [0, 1]")
        elif self.source.alphas is not None:
            raise ValueError("stay probabilities only apply to the markov source")

        deduped = list(dict.fromkeys(self.outputs))
        self.outputs = deduped
        if self.source.kind == "markov":
            if "mc" in deduped:
                raise ValueError("the Monte Carlo estimator supports independent sources only")
            if "extractor" in deduped:
                raise ValueError("the extractor demo supports independent sources only")
            if "closed_form" in deduped and self.j > 3:
                raise ValueError("no closed form beyond three correlated steps; request "
                                 "the oracle output instead")
        if "markov_sweep" in deduped and self.source.kind != "markov":
            raise ValueError("markov_sweep requires the markov source")
        if "extractor" in deduped and self.intercept.mode == PER_BIT and self.L != 1:
            raise ValueError("the extractor demo follows one schedule row; set L = 1")
        return self

    def mu_matrix(self) -> np.ndarray:
        """Canonical (L, j) matrix; per-file schedules broadcast across rows."""
        mu = np.asarray(self.intercept.mu, dtype=np.float64)
        if self.intercept.mode == PER_BIT:
            return mu
        return np.broadcast_to(mu, (self.L, self.j))

    def mu_steps(self) -> np.ndarray:
        """The single schedule row; only valid when one row exists."""
        matrix = self.mu_matrix()
        return matrix[0]

    def markov_params(self) -> Optional[MarkovParams]:
        if self.source.kind != "markov":
            return None
        return MarkovParams(alphas=tuple(float(a) for a in self.source.alphas))

    def oracle_config(self, steps: int) -> OracleConfig:
        mu = self.mu_matrix()[:, :steps]
        if self.intercept.mode == PER_BIT:
            intercept = InterceptSchedule.per_bit(mu)
        else:
            intercept = InterceptSchedule.per_file(np.asarray(self.intercept.mu)[:steps])
        source = None
        if self.source.kind == "markov":
            source = MarkovParams(alphas=tuple(float(a) for a in self.source.alphas[: steps - 1]))
        return OracleConfig(intercept=intercept, key_length=self.L, source=source)


@dataclass(frozen=True)
class ScenarioResult:
    """Everything a run produced, keyed by output file name."""

    name: str
    summary: dict
    files: dict[str, str]


def _closed_form(scenario: Scenario, steps: int) -> float:
    mu = scenario.mu_matrix()[:, :steps]
    if scenario.source.kind == "markov":
        row = [float(c) for c in mu[0]]
        alphas = [float(a) for a in scenario.source.alphas[: steps - 1]]
        if steps == 1:
            return eps_bit(row)
        if steps == 2:
            return markov_eps2(row[0], row[1], alphas[0])
        return markov_eps3(row[0], row[1], row[2], alphas[0], alphas[1])
    if scenario.intercept.mode == PER_BIT:
        return eps_key_independent(mu)
    return eps_key_file(scenario.L, mu[0])


def _capacity(scenario: Scenario, steps: int) -> float:
    mu = scenario.mu_matrix()[:, :steps]
    if scenario.intercept.mode == PER_BIT and scenario.source.kind == "iid":
        return float(sum(capacity(row) for row in mu))
    if scenario.intercept.mode == PER_BIT:
        return capacity(mu[0])
    return scenario.L * capacity(mu[0])


def _maurer(scenario: Scenario, steps: int) -> tuple[float, float]:
    mu = scenario.mu_matrix()[:, :steps]
    if scenario.intercept.mode == PER_BIT and scenario.source.kind == "iid":
        bounds = [maurer_bounds(row) for row in mu]
        return (float(sum(b[0] for b in bounds)), float(sum(b[1] for b in bounds)))
    low, high = maurer_bounds(mu[0])
    scale = 1 if scenario.intercept.mode == PER_BIT else scenario.L
    return (scale * low, scale * high)


def run_scenario(
    scenario: Scenario,
    seed: Optional[int] = None,
    trials: Optional[int] = None,
) -> ScenarioResult:
    """Execute one scenario and render its report files.

    The CSV carries one row per accumulation epoch with the requested
    quantities at 12 significant digits; the JSON summary repeats the
    final epoch plus run metadata.  Byte-identical for equal seeds.
    """
    eff_seed = scenario.seed if seed is None else int(seed)
    eff_trials = scenario.trials if trials is None else int(trials)
    wanted = scenario.outputs

    header = ["epoch"]
    if "closed_form" in wanted:
        header.append("closed_form")
    if "oracle" in wanted:
        header.append("oracle")
    if "mc" in wanted:
        header += ["mc_estimate", "mc_stderr"]
    if "capacity" in wanted:
        header.append("capacity")
    if "maurer" in wanted:
        header += ["maurer_lower", "maurer_upper"]
    show_gap = "capacity" in wanted and ("closed_form" in wanted or "oracle" in wanted)
    if show_gap:
        header.append("gap")

    rows: list[list[object]] = []
    summary: dict = {
        "name": scenario.name,
        "source": scenario.source.kind,
        "intercept_mode": scenario.intercept.mode,
        "key_length": scenario.L,
        "epochs": scenario.j,
        "seed": eff_seed,
        "outputs": list(wanted),
    }
    for step in range(1, scenario.j + 1):
        row: list[object] = [step]
        closed = oracle_value = None
        if "closed_form" in wanted:
            closed = _closed_form(scenario, step)
            row.append(closed)
        if "oracle" in wanted:
            oracle_value = exact_equivocation(scenario.oracle_config(step))
            row.append(oracle_value)
        if "mc" in wanted:
            estimate, stderr = mc_equivocation_independent(
                scenario.oracle_config(step), eff_trials, rng_from(eff_seed, STREAM_MC, step)
            )
            row += [estimate, stderr]
        if "capacity" in wanted:
            row.append(_capacity(scenario, step))
        if "maurer" in wanted:
            low, high = _maurer(scenario, step)
            row += [low, high]
        if show_gap:
            reference = closed if closed is not None else oracle_value
            row.append(_capacity(scenario, step) - reference)
        rows.append(row)

    last = rows[-1]
    for label, value in zip(header, last):
        if label != "epoch":
            summary[label] = value
    if "mc" in wanted:
        summary["trials"] = eff_trials

    files = {f"{scenario.name}.csv": render_csv(header, rows)}

    if "extractor" in wanted:
        files[f"{scenario.name}_extractor.csv"] = _extractor_table(scenario, eff_seed, summary)
    if "markov_sweep" in wanted:
        sweep_mu = None
        flat = scenario.mu_steps()
        if np.all(flat == flat[0]):
            sweep_mu = float(flat[0])
        sweep = sweep_markov(alpha_step=scenario.sweep_step, mu=sweep_mu)
        files[f"{scenario.name}_sweep.csv"] = sweep.files["markov_sweep.csv"]
        summary["sweep_rows"] = sweep.summary["rows"]
        summary["sweep_max_mirror_gap"] = sweep.summary["max_mirror_gap"]

    summary["files"] = sorted(files)
    files[f"{scenario.name}.json"] = render_json(summary)
    return ScenarioResult(name=scenario.name, summary=summary, files=files)


def _extractor_table(scenario: Scenario, seed: int, summary: dict) -> str:
    steps = scenario.mu_steps()
    bits, missed = sample_extractor_inputs(scenario.extractor_n, steps, seed)
    run = hash_extract(bits, missed, steps, seed)
    header = [
        "step",
        "mu",
        "hash_rows",
        "missed",
        "restricted_rank",
        "full_row_rank",
        "rank_prob_given_missed",
        "expected_full_rank",
    ]
    rows: list[list[object]] = []
    for i, m in enumerate(run.mu):
        h = run.hashes[i]
        rows.append(
            [
                i + 1,
                m,
                h.rows,
                run.missed_counts[i],
                run.restricted_ranks[i],
                run.full_row_rank[i],
                full_row_rank_prob(h.rows, run.missed_counts[i]),
                expected_full_row_rank_prob(run.n, m),
            ]
        )
    summary["extractor_n"] = run.n
    summary["extractor_output_bits"] = run.output_length
    summary["extractor_secret_fraction"] = (
        sum(run.restricted_ranks) / run.n if run.n else 0.0
    )
    return render_csv(header, rows)


@dataclass(frozen=True)
class SweepResult:
    summary: dict
    files: dict[str, str]


def sweep_markov(
    alpha_start: float = 0.0,
    alpha_stop: float = 1.0,
    alpha_step: float = 0.01,
    mu: Optional[float] = None,
) -> SweepResult:
    """Tabulate the correlation threshold over a stay-probability range.

    With a constant miss probability given, the table also carries the
    two- and three-step equivocations and their difference, whose sign
    flips exactly at the threshold.
    """
    if not 0.0 <= alpha_start <= alpha_stop <= 1.0:
        raise ValueError("the sweep range must satisfy 0 <= start <= stop <= 1")
    if not 0.0 < alpha_step <= 0.5:
        raise ValueError("the sweep step must lie in (0, 0.5]")
    if mu is not None and not 0.0 <= mu <= 1.0:
        raise ValueError("miss probability must lie in [0, 1]")
    alphas: list[float] = []
    k = 0
    while True:
        a = alpha_start + k * alpha_step
        if a > alpha_stop + 1e-12:
            break
        alphas.append(min(a, alpha_stop))
        k += 1
    header = ["alpha", "mu_hat"]
    if mu is not None:
        header += ["eps2", "eps3", "gain"]
    rows: list[list[object]] = []
    values: dict[float, float] = {}
    for a in alphas:
        threshold = mu_hat(a)
        values[round(a, 12)] = threshold
        row: list[object] = [a, threshold]
        if mu is not None:
            e2 = markov_eps2(mu, mu, a)
            e3 = markov_eps3_symmetric(mu, a)
            row += [e2, e3, e3 - e2]
        rows.append(row)
    mirror_gap = 0.0
    for a, value in values.items():
        partner = values.get(round(1.0 - a, 12))
        if partner is not None:
            mirror_gap = max(mirror_gap, abs(value - partner))
    summary = {"rows": len(rows), "max_mirror_gap": mirror_gap}
    if mu is not None:
        summary["mu"] = float(mu)
    return SweepResult(summary=summary, files={"markov_sweep.csv": render_csv(header, rows)})


@dataclass(frozen=True)
class ExtractorDemoResult:
    summary: dict
    files: dict[str, str]


def extractor_demo(
    n: int = 64,
    mu: tuple[float, ...] = (0.5,),
    draws: int = 1000,
    seed: int = 0,
) -> ExtractorDemoResult:
    """Empirical full-rank rate of the restricted hash against the analytic value.

    For each step, repeatedly draws a hash and a miss pattern, ranks the
    hash restricted to the missed realizations, and compares the observed
    full-rank rate with the binomial-averaged product formula.
    """
    if n < 1:
        raise ValueError("need at least one realization")
    if draws < 1:
        raise ValueError("need at least one draw")
    schedule = [float(m) for m in mu]
    if not schedule:
        raise ValueError("need at least one miss probability")
    if any(not 0.0 <= m <= 1.0 for m in schedule):
        raise ValueError("miss probabilities must lie in [0, 1]")
    header = [
        "step",
        "mu",
        "hash_rows",
        "draws",
        "empirical_full_rank",
        "analytic_full_rank",
        "stderr",
        "within_5_sigma",
        "mean_restricted_rank",
        "secret_fraction",
    ]
    rows: list[list[object]] = []
    all_within = True
    for i, m in enumerate(schedule):
        hash_rows = math.floor(m * n)
        rng = rng_from(seed, STREAM_EXTRACTOR, 2, i)
        full = 0
        rank_total = 0
        for _ in range(draws):
            miss = rng.random(n) < m
            if hash_rows == 0:
                rank = 0
                full += 1
            else:
                h = rng.integers(0, 2, size=(hash_rows, n), dtype=np.uint8)
                rank = gf2_rank(h[:, miss])
                full += int(rank == hash_rows)
            rank_total += rank
        empirical = full / draws
        analytic = expected_full_row_rank_prob(n, m)
        stderr = math.sqrt(max(analytic * (1.0 - analytic), 1e-30) / draws)
        within = abs(empirical - analytic) <= 5.0 * stderr if hash_rows else True
        all_within = all_within and within
        rows.append(
            [
                i + 1,
                m,
                hash_rows,
                draws,
                empirical,
                analytic,
                stderr,
                within,
                rank_total / draws,
                (rank_total / draws) / n,
            ]
        )
    summary = {
        "n": n,
        "draws": draws,
        "seed": int(seed),
        "steps": len(schedule),
        "all_within_5_sigma": all_within,
    }
    return ExtractorDemoResult(
        summary=summary, files={"extractor_demo.csv": render_csv(header, rows)}
    )
