"""Comparison of Monte Carlo estimates with closed forms, and the check suite."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .. import closedform as cf
from ..query import Mode, MomentQuery
from ..samplers import DistKind, RngStream, column_points
from .estimators import (
    Estimate,
    affine_split_residual,
    estimate_bp_weight,
    estimate_moment,
    gauss_gram_power,
    lyapunov_qr_estimate,
)

Z_MAX = 4.0
# relative floating-point resolution of an estimate; makes deterministic
# statistics (e.g. |det| of one unit column) comparable
RESOLUTION = 1e-12
LOG_PI = math.log(math.pi)


class DegenerateEstimatorError(ValueError):
    pass


class SuiteConfigError(ValueError):
    def __init__(self, index: int, reason: str):
        self.index = index
        super().__init__(f"invalid grid entry {index}: {reason}")


@dataclass
class VerificationReport:
    check: str
    params: dict
    closed_form: float
    estimate: Estimate
    z: float
    passed: bool
    flags: dict = field(default_factory=dict)

    @property
    def z_max(self) -> float:
        return self.flags.get("z_max", Z_MAX)

    @property
    def status(self) -> str:
        if self.flags.get("unstable"):
            return "unstable"
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict:
        est = self.estimate
        return {
            "check": self.check,
            "params": dict(self.params),
            "closed_form": self.closed_form,
            "estimate": {
                "mean": est.mean,
                "stderr": est.stderr,
                "count": est.count,
                "seed": est.seed,
                "streams": est.streams,
            },
            "z": self.z,
            "pass": self.passed,
            "flags": dict(self.flags),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VerificationReport":
        e = d["estimate"]
        flags = dict(d.get("flags", {}))
        estimate = Estimate(
            mean=e["mean"], stderr=e["stderr"], count=e["count"], seed=e["seed"],
            streams=e.get("streams", 1), unstable=bool(flags.get("unstable", False)),
            max_share=flags.get("max_share"), top_share=flags.get("top_share"),
        )
        return cls(d["check"], dict(d["params"]), d["closed_form"], estimate,
                   d["z"], d["pass"], flags)


def compare(estimate: Estimate, reference: float, z_max: float = Z_MAX, *,
            check: str = "moment", params: dict | None = None,
            flags: dict | None = None, resolution: float = 0.0) -> VerificationReport:
    """z-score of ``estimate`` against ``reference``; passes when ``|z| <= z_max``.

    ``resolution * |mean|`` is added in quadrature to the standard error.

    Raises
    ------
    DegenerateEstimatorError
        If the (combined) standard error is zero.
    """
    se = math.hypot(estimate.stderr, resolution * estimate.mean)
    if not se > 0:
        raise DegenerateEstimatorError("estimate has zero standard error")
    z = (estimate.mean - reference) / se
    out_flags = {"z_max": z_max}
    if estimate.max_share is not None:
        out_flags.update(unstable=estimate.unstable, max_share=estimate.max_share,
                         top_share=estimate.top_share)
    out_flags.update(flags or {})
    return VerificationReport(check, dict(params or {}), float(reference), estimate,
                              float(z), bool(abs(z) <= z_max), out_flags)


def _query_params(q: MomentQuery) -> dict:
    return {"mode": q.mode.value, "dist": q.dist.value, "beta": q.beta,
            "n": q.ambient_n, "N": q.inner_N, "exponent": q.exponent}


def verify_moment(query: MomentQuery, samples: int, rng: RngStream, z_max: float = Z_MAX, *,
                  printed_36prime: bool = False, printed_cor310: bool = False,
                  streams: int = 1, workers: int = 1, check: str | None = None) -> VerificationReport:
    """Estimate a moment and compare it with its closed form."""
    reference = cf.closed_form(query, printed_36prime=printed_36prime,
                               printed_cor310=printed_cor310)
    est = estimate_moment(query, samples, rng, streams, workers)
    flags = {"paper_form_36prime": printed_36prime, "paper_form_cor310": printed_cor310,
             "workers": workers}
    name = check or {Mode.LINEAR_SQUARE: "linear-moment", Mode.LINEAR_RECT: "linear-ratio",
                     Mode.AFFINE_SQUARE: "affine-moment", Mode.AFFINE_RECT: "affine-ratio"}[query.mode]
    return compare(est, reference, z_max, check=name, params=_query_params(query), flags=flags,
                   resolution=RESOLUTION)


def _difference(a: Estimate, b: Estimate, scale_a: float, scale_b: float) -> Estimate:
    return Estimate(
        mean=scale_a * a.mean - scale_b * b.mean,
        stderr=math.hypot(scale_a * a.stderr, scale_b * b.stderr),
        count=a.count + b.count,
        seed=a.seed,
        streams=a.streams,
    )


def verify_corollary3(beta, n: int, N: int, s: float, samples: int, rng: RngStream,
                      z_max: float = Z_MAX, streams: int = 1, workers: int = 1) -> VerificationReport:
    """Both sides of the Gaussian Gram-matrix reduction, each by Monte Carlo.

    ``pi^{beta n N/2} E_n[(det W)^s]`` against
    ``vol G * pi^{beta N^2/2} E_N[(det W)^{s + beta (n - N)/2}]``, reported as
    their difference with pooled standard error (reference 0).
    """
    if n < N or s < 0:
        raise ValueError("need n >= N and s >= 0")
    lhs = gauss_gram_power(beta, n, N, s, samples, rng.child(0), streams, workers)
    rhs = gauss_gram_power(beta, N, N, s + beta * (n - N) / 2, samples, rng.child(1), streams, workers)
    scale_l = math.exp(0.5 * beta * n * N * LOG_PI)
    scale_r = cf.grassmann_volume(beta, n, N) * math.exp(0.5 * beta * N * N * LOG_PI)
    diff = _difference(lhs, rhs, scale_l, scale_r)
    params = {"beta": int(beta), "n": n, "N": N, "s": s}
    flags = {"lhs": scale_l * lhs.mean, "rhs": scale_r * rhs.mean, "workers": workers}
    return compare(diff, 0.0, z_max, check="corollary3", params=params, flags=flags)


def verify_bp_linear(beta, n: int, N: int, alpha: float, samples: int, rng: RngStream,
                     z_max: float = Z_MAX, streams: int = 1, workers: int = 1) -> VerificationReport:
    """Linear Blaschke-Petkantschin decomposition with a frame-dependent weight.

    The weight is ``exp(-Tr M^dagger M - alpha ||row_1(M)||^2)``.  Its integral
    over ``n x N`` matrices is ``pi^{beta n N/2} (1 + alpha)^{-beta N/2}``; the
    decomposed side is estimated over Haar frames and ``N x N`` Gaussians.
    """
    if n < N or alpha < 0:
        raise ValueError("need n >= N and alpha >= 0")
    lhs = math.exp(0.5 * beta * n * N * LOG_PI - 0.5 * beta * N * math.log1p(alpha))
    est = estimate_bp_weight(beta, n, N, alpha, samples, rng, streams, workers)
    scale = cf.grassmann_volume(beta, n, N) * math.exp(0.5 * beta * N * N * LOG_PI)
    scaled = Estimate(scale * est.mean, scale * est.stderr, est.count, est.seed, est.streams)
    params = {"beta": int(beta), "n": n, "N": N, "alpha": alpha}
    return compare(scaled, lhs, z_max, check="bp-linear", params=params, flags={"workers": workers})


def verify_lyapunov(beta, N: int, t: int, reps: int, rng: RngStream, z_max: float = Z_MAX,
                    streams: int = 1, workers: int = 1) -> VerificationReport:
    est = lyapunov_qr_estimate(beta, N, t, reps, rng, streams, workers)
    ref = cf.mean_log_abs_det(DistKind.GAUSS, beta, N)
    params = {"beta": int(beta), "N": N, "t": t, "reps": reps}
    return compare(est, ref, z_max, check="lyapunov", params=params, flags={"workers": workers})


def verify_intrinsic_volume(N: int, k: int, samples: int, rng: RngStream, z_max: float = Z_MAX,
                            streams: int = 1, workers: int = 1) -> VerificationReport:
    """Mean intrinsic volume against the prefactor times ``E (det M_k^T M_k)^{1/2}``."""
    mode = Mode.LINEAR_SQUARE if k == N else Mode.LINEAR_RECT
    est = estimate_moment(MomentQuery("gauss", 1, N, k, 1.0, mode), samples, rng, streams, workers)
    c = cf.intrinsic_volume_prefactor(N, k)
    scaled = Estimate(c * est.mean, c * est.stderr, est.count, est.seed, est.streams)
    return compare(scaled, cf.intrinsic_volume_mean(N, k), z_max, check="intrinsic-volume",
                   params={"beta": 1, "n": N, "N": k, "k": k}, flags={"workers": workers})


def verify_pair_distance(beta, n: int, h: float, samples: int, rng: RngStream,
                         z_max: float = Z_MAX, streams: int = 1, workers: int = 1) -> VerificationReport:
    mode = Mode.AFFINE_SQUARE if n == 1 else Mode.AFFINE_RECT
    query = MomentQuery("gauss", beta, n, 1, h, mode)
    est = estimate_moment(query, samples, rng, streams, workers)
    return compare(est, cf.pair_distance_moment(beta, n, h), z_max, check="pair-distance",
                   params=_query_params(query), flags={"workers": workers},
                   resolution=RESOLUTION)


def check_affine_split(beta, n: int, N: int, samples: int, rng: RngStream, tol: float = 1e-10) -> float:
    """Max defect of the orthogonal split of sampled affine configurations.

    Raises ``AssertionError`` when it exceeds ``tol``.
    """
    pts = column_points(DistKind.GAUSS, beta, n, N + 1, rng, samples)
    residual = affine_split_residual(pts)
    if residual > tol:
        raise AssertionError(f"affine split defect {residual:.3e} > {tol:.0e}")
    return residual


# -- suite -------------------------------------------------------------------


@dataclass
class SuiteConfig:
    """Grids and budgets for :func:`run_suite`.

    ``affine_pairs`` and ``linear_pairs`` list ``(n, N)``; ``desk`` adds the
    hand-checked affine values and specialisations.
    """

    seed: int = 42
    z_max: float = Z_MAX
    samples: int = 100_000
    betas: tuple = (1, 2, 4)
    Ns: tuple = (1, 2, 3)
    dists: tuple = ("ball", "sphere", "gauss")
    qs: tuple = (0.7, 1.0, 2.0)
    hs: tuple = (1.0, 2.0)
    linear_pairs: tuple = ((2, 1), (3, 1), (3, 2), (4, 2))
    affine_pairs: tuple = ((2, 1), (3, 1), (3, 2), (4, 2))
    affine_Ns: tuple = (1, 2)
    desk: bool = True
    structural: bool = True
    lyapunov: tuple = ((1, 2), (2, 1))
    lyapunov_t: int = 1000
    lyapunov_reps: int = 20
    streams: int = 1
    workers: int = 1
    printed_36prime: bool = False
    printed_cor310: bool = False


class _Registry(list):
    """Collects suite entries, validating each as it is added."""

    def add(self, kind: str, make: Callable[[], dict]) -> None:
        try:
            args = make()
            if kind == "lyapunov" and (args["t"] < 100 or args["reps"] < 10):
                raise ValueError("lyapunov needs t >= 100 and reps >= 10")
        except ValueError as err:
            raise SuiteConfigError(len(self), str(err)) from None
        self.append((kind, args))


def _entries(cfg: SuiteConfig) -> list[tuple[str, dict]]:
    reg = _Registry()
    sq, rect = MomentQuery.square, MomentQuery.rect
    for b in cfg.betas:
        for N in cfg.Ns:
            for d in cfg.dists:
                for q in cfg.qs:
                    reg.add("moment", lambda: dict(query=sq(d, b, N, q)))
    for b in cfg.betas:
        for n, N in cfg.linear_pairs:
            for d in cfg.dists:
                for h in cfg.hs:
                    reg.add("moment", lambda: dict(query=rect(d, b, n, N, h)))
    for b in cfg.betas:
        for N in cfg.affine_Ns:
            for d in cfg.dists:
                for q in cfg.qs:
                    reg.add("moment", lambda: dict(query=sq(d, b, N, q, affine=True)))
    for b in cfg.betas:
        for n, N in cfg.affine_pairs:
            for d in cfg.dists:
                for h in cfg.hs:
                    reg.add("moment", lambda: dict(query=rect(d, b, n, N, h, affine=True)))
    if cfg.desk:
        for b, N, q in ((1, 2, 1), (1, 1, 2), (2, 1, 2)):
            reg.add("moment", lambda: dict(query=sq("sphere", b, N, q, affine=True), check="sphere-desk"))
        for d in ("ball", "sphere", "gauss"):
            reg.add("moment", lambda: dict(query=rect(d, 1, 2, 1, 2, affine=True), check="ratio-desk"))
        for b, n, N in ((1, 4, 2), (2, 3, 2)):
            reg.add("moment", lambda: dict(query=rect("sphere", b, n, N, 2, affine=True),
                                           check="sphere-ratio-open"))
        reg.add("moment", lambda: dict(query=sq("ball", 1, 2, 1, affine=True), check="kingman"))
        reg.add("moment", lambda: dict(query=sq("gauss", 1, 2, 1, affine=True), check="efron"))
    if cfg.structural:
        for b, n, N, s in ((1, 2, 1, 1.0), (2, 3, 2, 1.0), (4, 2, 1, 1.0)):
            reg.add("corollary3", lambda: dict(beta=b, n=n, N=N, s=s))
        for b, n, N, a in ((1, 2, 1, 1.0), (2, 2, 1, 0.5)):
            reg.add("bp-linear", lambda: dict(beta=b, n=n, N=N, alpha=a))
        for N, k in ((2, 1), (2, 2), (3, 1)):
            reg.add("intrinsic-volume", lambda: dict(N=N, k=k))
        for b in cfg.betas:
            for n in (1, 2, 3):
                reg.add("pair-distance", lambda: dict(beta=b, n=n, h=2.0))
    for b, N in cfg.lyapunov:
        reg.add("lyapunov", lambda: dict(beta=b, N=N, t=cfg.lyapunov_t, reps=cfg.lyapunov_reps))
    return reg


def run_suite(config: SuiteConfig | None = None,
              progress: Callable[[int, VerificationReport], None] | None = None) -> list[VerificationReport]:
    """Run every registered check; check ``i`` draws from ``RngStream(seed, i)``.

    Raises
    ------
    SuiteConfigError
        Naming the first grid entry that is not a valid experiment.
    """
    cfg = config or SuiteConfig()
    entries = _entries(cfg)
    reports = []
    kw = dict(z_max=cfg.z_max, streams=cfg.streams, workers=cfg.workers)
    for i, (kind, args) in enumerate(entries):
        rng = RngStream(cfg.seed, i)
        if kind == "moment":
            rep = verify_moment(args["query"], cfg.samples, rng, printed_36prime=cfg.printed_36prime,
                                printed_cor310=cfg.printed_cor310, check=args.get("check"), **kw)
        elif kind == "corollary3":
            rep = verify_corollary3(args["beta"], args["n"], args["N"], args["s"], cfg.samples, rng, **kw)
        elif kind == "bp-linear":
            rep = verify_bp_linear(args["beta"], args["n"], args["N"], args["alpha"], cfg.samples, rng, **kw)
        elif kind == "intrinsic-volume":
            rep = verify_intrinsic_volume(args["N"], args["k"], cfg.samples, rng, **kw)
        elif kind == "pair-distance":
            rep = verify_pair_distance(args["beta"], args["n"], args["h"], cfg.samples, rng, **kw)
        else:
            rep = verify_lyapunov(args["beta"], args["N"], args["t"], args["reps"], rng, **kw)
        rep.flags["index"] = i
        reports.append(rep)
        if progress is not None:
            progress(i, rep)
    return reports


def summary(reports: list[VerificationReport]) -> dict:
    counts = {"pass": 0, "fail": 0, "unstable": 0}
    for r in reports:
        counts[r.status] += 1
    counts["total"] = len(reports)
    return counts
