"""Line-oriented run configuration: `key=value` with dotted sections.

Blank lines and `#` comments are ignored; unknown keys are errors.  Problem
parameters are overridden through the `problem.` section, e.g.

    problem=turbulence
    problem.k0=4
    resolution=64 64 64
    scheme=cweno4fb
    flattener.tau_ho=1
    flattener.tau_lo=2
"""

import os
from dataclasses import dataclass, field, replace

from .eos import ADIABATIC, ISOTHERMAL, Eos
from .errors import ConfigError
from .problems import PROBLEMS, Turbulence, build_problem
from .rhs import INDICATOR_MODES, SCHEMES, SchemeConfig
from .shockguard import FlattenerParams

_KNOWN_KEYS = {
    "problem", "resolution", "scheme", "indicator", "eos", "c_cfl", "t_end",
    "ghost", "seed", "workers",
    "eos.gamma", "eos.cs",
    "weno.epsilon", "weno.power",
    "flattener.enabled", "flattener.tau_ho", "flattener.tau_lo",
    "fallback.enabled",
    "snapshot.every", "ledger.every",
    "output.dir",
    "reference.resolution",
}


@dataclass(frozen=True)
class RunConfig:
    problem_name: str
    problem_params: dict
    resolution: tuple
    scheme: str = "cweno4"
    indicator: str = "mhd"
    eos_mode: str | None = None
    gamma: float = 5.0 / 3.0
    cs: float = 0.1
    c_cfl: float | None = None
    t_end: float | None = None
    ghost: int = 5
    weno_epsilon: float = 1e-6
    weno_power: float = 2.0
    flattener_enabled: bool | None = None
    tau_ho: float = 1.0
    tau_lo: float = 2.0
    fallback_enabled: bool | None = None
    snapshot_every: float = 0.0
    ledger_every: int = 1
    output_dir: str = "out"
    workers: int = 1
    reference_resolution: int = 0

    def problem(self):
        return build_problem(self.problem_name, self.problem_params)

    def eos(self) -> Eos:
        prob = self.problem()
        if self.eos_mode is None:
            return prob.default_eos()
        if self.eos_mode == ISOTHERMAL:
            return Eos(ISOTHERMAL, cs=self.cs)
        return Eos(ADIABATIC, gamma=self.gamma)

    def scheme_config(self) -> SchemeConfig:
        eos = self.eos()
        is_fb = self.scheme == "cweno4fb"
        flat_on = self.flattener_enabled if self.flattener_enabled is not None \
            else is_fb
        fall_on = self.fallback_enabled if self.fallback_enabled is not None \
            else is_fb
        prob = self.problem()
        c_cfl = self.c_cfl if self.c_cfl is not None else prob.default_c_cfl
        return SchemeConfig(
            eos=eos, scheme=self.scheme, indicator=self.indicator,
            weno_eps=self.weno_epsilon, weno_power=self.weno_power,
            flattener=FlattenerParams(enabled=flat_on, tau_ho=self.tau_ho,
                                      tau_lo=self.tau_lo),
            aposteriori=fall_on, c_cfl=c_cfl)

    def grid_spec(self, resolution=None):
        nx, ny, nz = resolution or self.resolution
        return self.problem().make_spec(nx, ny, nz, ghost=self.ghost)

    def end_time(self):
        return self.t_end if self.t_end is not None \
            else self.problem().default_t_end

    def with_resolution(self, nx, ny, nz):
        return replace(self, resolution=(nx, ny, nz))


def _parse_bool(value, lineno):
    if value.lower() in ("true", "1", "yes", "on"):
        return True
    if value.lower() in ("false", "0", "no", "off"):
        return False
    raise ConfigError(f"line {lineno}: expected a boolean, got {value!r}")


def parse_config(text: str) -> RunConfig:
    pairs = {}
    problem_params = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key.startswith("problem."):
            problem_params[(key[len("problem."):], lineno)] = value
            continue
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        pairs[key] = (value, lineno)

    def get(key, default=None):
        return pairs[key][0] if key in pairs else default

    name = get("problem")
    if name is None:
        raise ConfigError("missing required key 'problem'")
    if name not in PROBLEMS:
        raise ConfigError(f"unknown problem {name!r} "
                          f"(choose from {sorted(PROBLEMS)})")

    params = {}
    for (pname, lineno), value in problem_params.items():
        fields_ = PROBLEMS[name].__dataclass_fields__
        if pname not in fields_:
            raise ConfigError(f"line {lineno}: problem {name!r} has no "
                              f"parameter {pname!r}")
        ftype = fields_[pname].type
        try:
            params[pname] = int(value) if ftype is int or ftype == "int" \
                else float(value)
        except ValueError:
            raise ConfigError(f"line {lineno}: bad value for "
                              f"problem.{pname}: {value!r}")
    if "seed" in pairs and name == "turbulence":
        params["seed"] = int(pairs["seed"][0])

    if "resolution" in pairs:
        toks = pairs["resolution"][0].split()
        if len(toks) != 3:
            raise ConfigError(f"line {pairs['resolution'][1]}: resolution "
                              "expects three integers")
        resolution = tuple(int(t) for t in toks)
    else:
        resolution = PROBLEMS[name].default_resolution

    scheme = get("scheme", "cweno4")
    if scheme not in SCHEMES:
        raise ConfigError(f"unknown scheme {scheme!r} "
                          f"(choose from {SCHEMES})")
    indicator = get("indicator", "mhd")
    if indicator not in INDICATOR_MODES:
        raise ConfigError(f"unknown indicator {indicator!r}")

    eos_mode = get("eos")
    if eos_mode is not None and eos_mode not in (ADIABATIC, ISOTHERMAL):
        raise ConfigError(f"unknown eos {eos_mode!r}")
    if name == "turbulence":
        if eos_mode == ADIABATIC:
            raise ConfigError("the turbulence problem requires eos=isothermal")
    elif eos_mode == ISOTHERMAL:
        raise ConfigError(f"problem {name!r} requires the adiabatic eos")

    flat_on = _parse_bool(*pairs["flattener.enabled"]) \
        if "flattener.enabled" in pairs else None
    fall_on = _parse_bool(*pairs["fallback.enabled"]) \
        if "fallback.enabled" in pairs else None
    tau_ho = float(get("flattener.tau_ho", 1.0))
    tau_lo = float(get("flattener.tau_lo", 2.0))
    if not tau_ho < tau_lo:
        raise ConfigError("flattener thresholds require tau_ho < tau_lo")

    outdir = os.environ.get("CWENOMHD_OUTDIR") or get("output.dir", "out")

    cfg = RunConfig(
        problem_name=name,
        problem_params=params,
        resolution=resolution,
        scheme=scheme,
        indicator=indicator,
        eos_mode=eos_mode,
        gamma=float(get("eos.gamma", 5.0 / 3.0)),
        cs=float(get("eos.cs", 0.1)),
        c_cfl=float(pairs["c_cfl"][0]) if "c_cfl" in pairs else None,
        t_end=float(pairs["t_end"][0]) if "t_end" in pairs else None,
        ghost=int(get("ghost", 5)),
        weno_epsilon=float(get("weno.epsilon", 1e-6)),
        weno_power=float(get("weno.power", 2.0)),
        flattener_enabled=flat_on,
        tau_ho=tau_ho,
        tau_lo=tau_lo,
        fallback_enabled=fall_on,
        snapshot_every=float(get("snapshot.every", 0.0)),
        ledger_every=int(get("ledger.every", 1)),
        output_dir=outdir,
        workers=int(get("workers", 1)),
        reference_resolution=int(get("reference.resolution", 0)),
    )
    cfg.scheme_config()  # validate combinations eagerly
    return cfg


def load_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as f:
        return parse_config(f.read())
