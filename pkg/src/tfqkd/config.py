"""Structured configuration: schema-validated YAML covering every model coefficient.

A configuration file can start from a built-in scenario preset and
override any subset of the laser, cavity, loop, fiber, budget, channel,
protocol and sweep parameters, or define a topology from scratch.  An
explicit operating_point pins the coherence numbers; without one the
solver runs on the configured spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import jsonschema
import yaml

from .coherence import CoherenceBudget, solve_tau_q
from .decoy import DecoySet
from .errors import ConfigError
from .link import DetectorParams
from .scenarios import (
    DETECTORS,
    OperatingPoint,
    PROTOCOL_NAMES,
    ProtocolParams,
    SweepSpec,
    builtin_scenarios,
)
from .spectra import (
    CavityParams,
    FiberParams,
    LaserFreeParams,
    LaserSpec,
    LoopParams,
    TopologyConfig,
    TopologyKind,
)
from . import cal as cal_mod
from . import sns as sns_mod
from .link import MisalignmentParams

__all__ = ["FullConfig", "load_config", "loads_config", "dump_config", "default_config_dict"]

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_NONNEG = {"type": "number", "minimum": 0}
_BOOL = {"type": "boolean"}


def _obj(props: dict) -> dict:
    return {"type": "object", "properties": props, "additionalProperties": False}


CONFIG_SCHEMA = _obj({
    "scenario": _obj({"preset": {"type": "integer", "minimum": 1, "maximum": 7}}),
    "topology": _obj({
        "kind": {"enum": ["common_laser", "independent_lasers"]},
        "laser_stabilized": _BOOL,
        "fiber_stabilized": _BOOL,
        "l_a_km": _NONNEG,
        "l_b_km": _NONNEG,
        "refractive_index": _POS,
        "fiber_roundtrip_factor": _NONNEG,
    }),
    "laser": _obj({"r3": _NONNEG, "r2": _NONNEG, "f_c_hz": _POS}),
    "cavity": _obj({"c4": _NONNEG, "c3": _NONNEG, "c2": _NONNEG}),
    "loop": _obj({"bandwidth_hz": _POS, "gamma": _POS, "delta": _POS}),
    "fiber": _obj({
        "noise_per_km": _NONNEG, "f_c_free_hz": _POS, "s0": _NONNEG,
        "f_c_floor_hz": _POS, "lambda_s_nm": _POS, "lambda_q_nm": _POS,
    }),
    "budget": _obj({
        "sigma_threshold_rad": _POS, "tau_max_s": _POS, "tau_ps_s": _POS,
        "tau_floor_s": _POS, "f_max_hz": _POS,
    }),
    "channel": _obj({"alpha_db_per_km": _NONNEG, "a_plus_db": _NONNEG}),
    "protocol": _obj({
        "e_theta": _NONNEG,
        "f_ec": {"type": "number", "minimum": 1},
        "decoys": _obj({"u": _POS, "v": _POS, "w": _NONNEG}),
        "sns": _obj({"epsilon": _POS, "mu_z": _POS, "mu_0": _NONNEG, "p_z": _POS}),
        "cal": _obj({"mu_zeta": _POS}),
    }),
    "operating_point": _obj({
        "tau_q_s": _POS, "sigma_phi_rad": _NONNEG, "e_phi": _NONNEG,
    }),
    "detector": _obj({
        "preset": {"enum": sorted(DETECTORS)},
        "eta_d": _POS, "dark_rate_hz": _NONNEG, "clock_rate_hz": _POS,
    }),
    "sweep": _obj({
        "x_axis": {"enum": ["total_attenuation_db", "total_length_km"]},
        "start": _NONNEG, "stop": _NONNEG, "step": _POS,
        "detector": {"enum": sorted(DETECTORS)},
        "protocols": {
            "type": "array", "minItems": 1,
            "items": {"enum": list(PROTOCOL_NAMES)},
        },
    }),
})


@dataclass(frozen=True)
class FullConfig:
    """Resolved configuration ready for the sweep engine."""

    topology: TopologyConfig
    laser: LaserSpec = field(default_factory=LaserSpec)
    fiber: FiberParams = field(default_factory=FiberParams)
    budget: CoherenceBudget = field(default_factory=CoherenceBudget)
    protocol: ProtocolParams = field(default_factory=ProtocolParams)
    detector: Optional[DetectorParams] = None
    operating_point: Optional[OperatingPoint] = None
    sweep: SweepSpec = field(default_factory=SweepSpec)

    def resolve_operating_point(self) -> OperatingPoint:
        """Explicit operating point, or a live solve on the configured spectrum."""
        if self.operating_point is not None:
            return self.operating_point
        from .spectra import interference_spectrum
        res = solve_tau_q(interference_spectrum(self.topology, self.laser,
                                                self.fiber), self.budget)
        return OperatingPoint(tau_q=res.tau_q, sigma_phi=res.sigma_phi,
                              e_phi=res.e_phi, tau_ps=self.budget.tau_ps)


def _validate(raw: dict) -> None:
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(raw), key=lambda e: e.json_path)
    if errors:
        msgs = "; ".join(f"{e.json_path}: {e.message}" for e in errors)
        raise ConfigError(f"configuration invalid: {msgs}")


def _build(raw: dict) -> FullConfig:
    base_topo = None
    base_op = None
    if "scenario" in raw and "preset" in raw["scenario"]:
        preset = {p.id: p for p in builtin_scenarios()}[raw["scenario"]["preset"]]
        base_topo = preset.topology
        base_op = preset.operating_point
    topo_raw = raw.get("topology", {})
    if base_topo is None and not topo_raw:
        raise ConfigError("configuration needs a scenario preset or a topology section")
    topo_kwargs = {}
    if "kind" in topo_raw:
        topo_kwargs["kind"] = TopologyKind(topo_raw["kind"])
    for src, dst in (("laser_stabilized", "laser_stabilized"),
                     ("fiber_stabilized", "fiber_stabilized"),
                     ("l_a_km", "l_a"), ("l_b_km", "l_b"),
                     ("refractive_index", "refractive_index"),
                     ("fiber_roundtrip_factor", "fiber_roundtrip_factor")):
        if src in topo_raw:
            topo_kwargs[dst] = topo_raw[src]
    topology = replace(base_topo, **topo_kwargs) if base_topo is not None \
        else TopologyConfig(**topo_kwargs)

    las_raw = raw.get("laser", {})
    free = LaserFreeParams(r3=las_raw.get("r3", 3e6), r2=las_raw.get("r2", 3e2),
                           f_c=las_raw.get("f_c_hz", 2e6))
    cav_raw = raw.get("cavity", {})
    cavity = CavityParams(c4=cav_raw.get("c4", 0.5), c3=cav_raw.get("c3", 0.0),
                          c2=cav_raw.get("c2", 2e-3))
    loop_raw = raw.get("loop", {})
    loop = LoopParams(bandwidth=loop_raw.get("bandwidth_hz", 3e5),
                      gamma=loop_raw.get("gamma", 0.1),
                      delta=loop_raw.get("delta", 10.0))
    laser = LaserSpec(free=free, cavity=cavity, loop=loop)

    fib_raw = raw.get("fiber", {})
    fiber = FiberParams(
        noise_per_km=fib_raw.get("noise_per_km", 44.0),
        f_c_free=fib_raw.get("f_c_free_hz", 100.0),
        s0=fib_raw.get("s0", 1e-8),
        f_c_floor=fib_raw.get("f_c_floor_hz", 2e5),
        lambda_s_nm=fib_raw.get("lambda_s_nm", 1543.33),
        lambda_q_nm=fib_raw.get("lambda_q_nm", 1542.14))

    bud_raw = raw.get("budget", {})
    budget = CoherenceBudget(
        sigma_threshold=bud_raw.get("sigma_threshold_rad", 0.2),
        tau_max=bud_raw.get("tau_max_s", 0.1),
        tau_ps=bud_raw.get("tau_ps_s", 1e-3),
        tau_floor=bud_raw.get("tau_floor_s", 1e-6),
        f_max=bud_raw.get("f_max_hz"))

    prot_raw = raw.get("protocol", {})
    dec_raw = prot_raw.get("decoys", {})
    decoys = DecoySet(u=dec_raw.get("u", 0.4), v=dec_raw.get("v", 0.16),
                      w=dec_raw.get("w", 1e-5))
    sns_raw = prot_raw.get("sns", {})
    f_ec = prot_raw.get("f_ec", 1.15)
    sns_params = sns_mod.SnsParams(
        p_z=sns_raw.get("p_z", 1.0), epsilon=sns_raw.get("epsilon", 0.25),
        mu_z=sns_raw.get("mu_z", 0.2), mu_0=sns_raw.get("mu_0", 5e-6),
        decoys=decoys, f_ec=f_ec)
    cal_raw = prot_raw.get("cal", {})
    cal_params = cal_mod.CalParams(mu_zeta=cal_raw.get("mu_zeta", 0.018), f_ec=f_ec)
    protocol = ProtocolParams(
        decoys=decoys, sns=sns_params, cal=cal_params,
        misalignment=MisalignmentParams(e_theta=prot_raw.get("e_theta", 0.02)),
        f_ec=f_ec)

    op = base_op
    if "operating_point" in raw:
        op_raw = raw["operating_point"]
        missing = {"tau_q_s", "sigma_phi_rad", "e_phi"} - set(op_raw)
        if missing:
            raise ConfigError(f"operating_point missing fields: {sorted(missing)}")
        op = OperatingPoint(tau_q=op_raw["tau_q_s"],
                            sigma_phi=op_raw["sigma_phi_rad"],
                            e_phi=op_raw["e_phi"], tau_ps=budget.tau_ps)

    detector = None
    det_raw = raw.get("detector", {})
    if det_raw:
        base = DETECTORS[det_raw["preset"]] if "preset" in det_raw else None
        if {"eta_d", "dark_rate_hz", "clock_rate_hz"} & set(det_raw):
            detector = DetectorParams(
                eta_d=det_raw.get("eta_d", base.eta_d if base else 0.9),
                dark_rate=det_raw.get("dark_rate_hz", base.dark_rate if base else 10.0),
                clock_rate=det_raw.get("clock_rate_hz",
                                       base.clock_rate if base else 1e9))
        else:
            detector = base

    sw_raw = raw.get("sweep", {})
    sweep = SweepSpec(
        x_axis=sw_raw.get("x_axis", "total_attenuation_db"),
        start=sw_raw.get("start", 0.0), stop=sw_raw.get("stop", 80.0),
        step=sw_raw.get("step", 1.0), detector=sw_raw.get("detector", "snspd"),
        protocols=tuple(sw_raw.get("protocols", PROTOCOL_NAMES)),
        alpha=raw.get("channel", {}).get("alpha_db_per_km", 0.2),
        a_plus=raw.get("channel", {}).get("a_plus_db", 0.0))

    return FullConfig(topology=topology, laser=laser, fiber=fiber, budget=budget,
                      protocol=protocol, detector=detector, operating_point=op,
                      sweep=sweep)


def loads_config(text: str) -> FullConfig:
    """Parse and validate a YAML configuration string."""
    raw = yaml.safe_load(text)
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("configuration root must be a mapping")
    _validate(raw)
    return _build(raw)


def load_config(path) -> FullConfig:
    """Load, schema-validate and resolve a YAML configuration file."""
    with open(path, "r", encoding="utf-8") as fh:
        return loads_config(fh.read())


def _to_dict(cfg: FullConfig) -> dict:
    d = {
        "topology": {
            "kind": cfg.topology.kind.value,
            "laser_stabilized": cfg.topology.laser_stabilized,
            "fiber_stabilized": cfg.topology.fiber_stabilized,
            "l_a_km": cfg.topology.l_a,
            "l_b_km": cfg.topology.l_b,
            "refractive_index": cfg.topology.refractive_index,
            "fiber_roundtrip_factor": cfg.topology.fiber_roundtrip_factor,
        },
        "laser": {"r3": cfg.laser.free.r3, "r2": cfg.laser.free.r2,
                  "f_c_hz": cfg.laser.free.f_c},
        "cavity": {"c4": cfg.laser.cavity.c4, "c3": cfg.laser.cavity.c3,
                   "c2": cfg.laser.cavity.c2},
        "loop": {"bandwidth_hz": cfg.laser.loop.bandwidth,
                 "gamma": cfg.laser.loop.gamma, "delta": cfg.laser.loop.delta},
        "fiber": {"noise_per_km": cfg.fiber.noise_per_km,
                  "f_c_free_hz": cfg.fiber.f_c_free, "s0": cfg.fiber.s0,
                  "f_c_floor_hz": cfg.fiber.f_c_floor,
                  "lambda_s_nm": cfg.fiber.lambda_s_nm,
                  "lambda_q_nm": cfg.fiber.lambda_q_nm},
        "budget": {"sigma_threshold_rad": cfg.budget.sigma_threshold,
                   "tau_max_s": cfg.budget.tau_max, "tau_ps_s": cfg.budget.tau_ps,
                   "tau_floor_s": cfg.budget.tau_floor},
        "channel": {"alpha_db_per_km": cfg.sweep.alpha,
                    "a_plus_db": cfg.sweep.a_plus},
        "protocol": {
            "e_theta": cfg.protocol.misalignment.e_theta,
            "f_ec": cfg.protocol.f_ec,
            "decoys": {"u": cfg.protocol.decoys.u, "v": cfg.protocol.decoys.v,
                       "w": cfg.protocol.decoys.w},
            "sns": {"epsilon": cfg.protocol.sns.epsilon,
                    "mu_z": cfg.protocol.sns.mu_z, "mu_0": cfg.protocol.sns.mu_0,
                    "p_z": cfg.protocol.sns.p_z},
            "cal": {"mu_zeta": cfg.protocol.cal.mu_zeta},
        },
        "sweep": {"x_axis": cfg.sweep.x_axis, "start": cfg.sweep.start,
                  "stop": cfg.sweep.stop, "step": cfg.sweep.step,
                  "detector": cfg.sweep.detector,
                  "protocols": list(cfg.sweep.protocols)},
    }
    if cfg.budget.f_max is not None:
        d["budget"]["f_max_hz"] = cfg.budget.f_max
    if cfg.operating_point is not None:
        d["operating_point"] = {
            "tau_q_s": cfg.operating_point.tau_q,
            "sigma_phi_rad": cfg.operating_point.sigma_phi,
            "e_phi": cfg.operating_point.e_phi,
        }
    if cfg.detector is not None:
        d["detector"] = {"eta_d": cfg.detector.eta_d,
                         "dark_rate_hz": cfg.detector.dark_rate,
                         "clock_rate_hz": cfg.detector.clock_rate}
    return d


def dump_config(cfg: FullConfig) -> str:
    """Serialize a configuration to YAML; loads_config(dump_config(c)) == c."""
    return yaml.safe_dump(_to_dict(cfg), sort_keys=True)


def default_config_dict() -> dict:
    """Plain-dict template of every overridable coefficient, at defaults."""
    return _to_dict(FullConfig(topology=TopologyConfig()))
