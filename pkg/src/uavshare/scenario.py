"""Random UAV deployments and their large-scale gain matrices.

HCUs and LCU transmitters are dropped uniformly over a square area (a
Poisson process conditioned on the count). Each LCU flies along a straight
lane with a random heading and its receiver is the next UAV on that lane,
trailing at an exponential gap with mean ``2 s x speed``. The RBS sits at
the area centre and the HAP straight above it.

Every HCU and every LCU draws from its own random stream, keyed by the
scenario seed and the UAV index. Sweeps that change one parameter therefore
keep the same positions and shadowing wherever possible.
"""

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .capacity import ConnectivityMode
from .channel import RfParams, PairGains, db_to_linear, path_gain
from .energy import EnergyModel
from .power import PowerLimits, QosRequirements

_HCU_STREAM = 0
_LCU_STREAM = 1


class ConfigError(ValueError):
    """Invalid scenario or sweep configuration."""


@dataclass(frozen=True)
class ScenarioConfig:
    """Deployment, radio and QoS settings of one scenario.

    ``fixed_rbs_distance`` (meters), when set, replaces the geometric
    UAV-RBS distance for every UAV; the geometry still drives all other
    links.
    """

    area_side: float = 2000.0
    n_hcu: int = 20
    n_lcu_pairs: int = 20
    rbs_height: float = 20.0
    hap_altitude: float = 17000.0
    uav_altitude: float = 100.0
    speed: float = 70.0 / 3.6
    spacing_time: float = 2.0
    min_pair_distance: float = 1.0
    fixed_rbs_distance: float | None = None
    rf: RfParams = field(default_factory=RfParams)
    limits: PowerLimits = field(default_factory=PowerLimits)
    qos: QosRequirements = field(default_factory=QosRequirements)
    energy: EnergyModel = field(default_factory=EnergyModel)
    seed: int = 0
    mode: ConnectivityMode = ConnectivityMode.MC_COMBINED

    def __post_init__(self):
        object.__setattr__(self, "mode", ConnectivityMode(self.mode))
        if not self.area_side > 0:
            raise ConfigError("area_side must be positive")
        if self.n_hcu < 0 or self.n_lcu_pairs < 0:
            raise ConfigError("UAV counts must be non-negative")
        if min(self.rbs_height, self.hap_altitude, self.uav_altitude) < 0:
            raise ConfigError("heights and altitudes must be non-negative")
        if self.speed < 0 or self.spacing_time < 0:
            raise ConfigError("speed and spacing time must be non-negative")
        if not self.min_pair_distance > 0:
            raise ConfigError("min_pair_distance must be positive")
        if self.fixed_rbs_distance is not None and not self.fixed_rbs_distance > 0:
            raise ConfigError("fixed_rbs_distance must be positive")
        if not 0 <= self.seed < 2**63:
            raise ConfigError("seed must be a non-negative 63-bit integer")

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    @property
    def rbs_position(self):
        return np.array([self.area_side / 2, self.area_side / 2, self.rbs_height])

    @property
    def hap_position(self):
        return np.array([self.area_side / 2, self.area_side / 2, self.hap_altitude])


@dataclass
class ScenarioInstance:
    """Positions and large-scale gains of one drawn scenario.

    Gains already include antenna gains and receiver noise figures.
    ``a_ij[i, j]`` is the gain from HCU ``i`` to the receiver of LCU ``j``.
    """

    config: ScenarioConfig
    hcu_pos: np.ndarray
    lcu_tx: np.ndarray
    lcu_rx: np.ndarray
    hcu_heading: np.ndarray
    lcu_heading: np.ndarray
    a_iR: np.ndarray
    a_iH: np.ndarray
    a_jj: np.ndarray
    a_jR: np.ndarray
    a_jH: np.ndarray
    a_ij: np.ndarray

    @property
    def n_hcu(self):
        return self.a_iR.size

    @property
    def n_lcu(self):
        return self.a_jj.size

    def pair_gains(self):
        """Broadcastable :class:`PairGains` over the I x J grid."""
        return PairGains(
            a_jj=self.a_jj[None, :], a_ij=self.a_ij,
            a_iR=self.a_iR[:, None], a_iH=self.a_iH[:, None],
            a_jR=self.a_jR[None, :], a_jH=self.a_jH[None, :],
        )

    def pair_distances(self):
        return np.linalg.norm(self.lcu_tx - self.lcu_rx, axis=1)

    def doppler_to_rbs(self):
        """Doppler shift (Hz) of each HCU towards the RBS; informational only."""
        rf = self.config.rf
        los = self.config.rbs_position - self.hcu_pos
        los /= np.linalg.norm(los, axis=1, keepdims=True)
        vel = np.stack([np.cos(self.hcu_heading), np.sin(self.hcu_heading),
                        np.zeros_like(self.hcu_heading)], axis=1)
        return self.config.speed / rf.wavelength * np.sum(vel * los, axis=1)


def _stream(seed, kind, index):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(kind, index)))


def generate(cfg):
    """Draw one scenario instance from ``cfg`` (deterministic in ``cfg.seed``)."""
    I, J = cfg.n_hcu, cfg.n_lcu_pairs
    side, h = cfg.area_side, cfg.uav_altitude
    rf = cfg.rf

    hcu_pos = np.empty((I, 3))
    hcu_heading = np.empty(I)
    z_hcu = np.empty((I, 2))
    for i in range(I):
        rng = _stream(cfg.seed, _HCU_STREAM, i)
        hcu_pos[i, :2] = rng.uniform(0.0, side, 2)
        hcu_heading[i] = rng.uniform(0.0, 2 * np.pi)
        z_hcu[i] = rng.standard_normal(2)
    hcu_pos[:, 2] = h

    lcu_tx = np.empty((J, 3))
    lcu_rx = np.empty((J, 3))
    lcu_heading = np.empty(J)
    z_lcu = np.empty((J, 3))
    z_cross = np.empty((I, J))
    for j in range(J):
        rng = _stream(cfg.seed, _LCU_STREAM, j)
        lcu_tx[j, :2] = rng.uniform(0.0, side, 2)
        lcu_heading[j] = rng.uniform(0.0, 2 * np.pi)
        gap = rng.standard_exponential()
        z_lcu[j] = rng.standard_normal(3)
        z_cross[:, j] = rng.standard_normal(I)
        d = max(cfg.min_pair_distance, cfg.spacing_time * cfg.speed * gap)
        # the receiver trails the transmitter on the same lane
        lcu_rx[j, 0] = lcu_tx[j, 0] - d * np.cos(lcu_heading[j])
        lcu_rx[j, 1] = lcu_tx[j, 1] - d * np.sin(lcu_heading[j])
    lcu_tx[:, 2] = h
    lcu_rx[:, 2] = h

    rbs, hap = cfg.rbs_position, cfg.hap_position
    if cfg.fixed_rbs_distance is None:
        d_iR = np.linalg.norm(hcu_pos - rbs, axis=1)
        d_jR = np.linalg.norm(lcu_tx - rbs, axis=1)
    else:
        d_iR = np.full(I, cfg.fixed_rbs_distance)
        d_jR = np.full(J, cfg.fixed_rbs_distance)
    d_iH = np.linalg.norm(hcu_pos - hap, axis=1)
    d_jH = np.linalg.norm(lcu_tx - hap, axis=1)
    d_jj = np.linalg.norm(lcu_tx - lcu_rx, axis=1)
    d_ij = np.linalg.norm(hcu_pos[:, None, :] - lcu_rx[None, :, :], axis=2)

    to_rbs = rf.budget("uav", "rbs")
    to_hap = rf.budget("uav", "hap")
    to_uav = rf.budget("uav", "uav")
    return ScenarioInstance(
        config=cfg,
        hcu_pos=hcu_pos, lcu_tx=lcu_tx, lcu_rx=lcu_rx,
        hcu_heading=hcu_heading, lcu_heading=lcu_heading,
        a_iR=to_rbs * path_gain(d_iR, rf, rf.sigma_rbs_db, z_hcu[:, 0]),
        a_iH=to_hap * path_gain(d_iH, rf, rf.sigma_hap_db, z_hcu[:, 1]),
        a_jj=to_uav * path_gain(d_jj, rf, rf.sigma_uav_db, z_lcu[:, 0]),
        a_jR=to_rbs * path_gain(d_jR, rf, rf.sigma_rbs_db, z_lcu[:, 1]),
        a_jH=to_hap * path_gain(d_jH, rf, rf.sigma_hap_db, z_lcu[:, 2]),
        a_ij=to_uav * path_gain(d_ij, rf, rf.sigma_uav_db, z_cross),
    )


# ---- configuration files -------------------------------------------------

_SCENARIO_KEYS = ("area_side", "n_hcu", "n_lcu_pairs", "rbs_height", "hap_altitude",
                  "uav_altitude", "speed", "spacing_time", "min_pair_distance",
                  "fixed_rbs_distance", "seed", "mode")
_INT_KEYS = {"n_hcu", "n_lcu_pairs", "seed"}

# alternative spellings accepted on input: key -> (canonical key, converter)
_ALIASES = {
    "limits": {"p_max_hcu_dbm": ("p_max_hcu", lambda v: db_to_linear(v, "dbm")),
               "p_max_lcu_dbm": ("p_max_lcu", lambda v: db_to_linear(v, "dbm")),
               "noise_dbm": ("noise", lambda v: db_to_linear(v, "dbm"))},
    "qos": {"sinr_min_lcu_db": ("sinr_min_lcu", db_to_linear)},
    "rf": {"noise_power_dbm": ("noise_power", lambda v: db_to_linear(v, "dbm"))},
    "scenario": {"speed_kmh": ("speed", lambda v: v / 3.6)},
}


def _section(cls, data, name):
    data = dict(data or {})
    for alias, (key, conv) in _ALIASES.get(name, {}).items():
        if alias in data:
            if key in data:
                raise ConfigError(f"[{name}] sets both {alias} and {key}")
            data[key] = conv(data.pop(alias))
    known = {f.name for f in dataclasses.fields(cls)} if cls else set(_SCENARIO_KEYS)
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown key(s) in [{name}]: {', '.join(sorted(unknown))}")
    return data


def config_from_dict(data):
    """Build a :class:`ScenarioConfig` from nested sections.

    Sections are ``scenario``, ``rf``, ``limits``, ``qos`` and ``energy``;
    missing keys take their defaults. Power keys are in watts, or in dBm
    with a ``_dbm`` suffix; the SINR threshold accepts ``sinr_min_lcu_db``.
    """
    extra = set(data) - {"scenario", "rf", "limits", "qos", "energy"}
    if extra:
        raise ConfigError(f"unknown section(s): {', '.join(sorted(extra))}")
    try:
        top = _section(None, data.get("scenario"), "scenario")
        for k in _INT_KEYS & set(top):
            if int(top[k]) != top[k]:
                raise ConfigError(f"{k} must be an integer")
            top[k] = int(top[k])
        for k in set(top) - _INT_KEYS - {"mode"}:
            top[k] = float(top[k])
        return ScenarioConfig(
            rf=RfParams(**_section(RfParams, data.get("rf"), "rf")),
            limits=PowerLimits(**_section(PowerLimits, data.get("limits"), "limits")),
            qos=QosRequirements(**_section(QosRequirements, data.get("qos"), "qos")),
            energy=EnergyModel(**_section(EnergyModel, data.get("energy"), "energy")),
            **top,
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def config_to_dict(cfg):
    """Inverse of :func:`config_from_dict`; ``None`` entries are omitted."""
    top = {}
    for k in _SCENARIO_KEYS:
        v = getattr(cfg, k)
        if v is None:
            continue
        top[k] = v.value if isinstance(v, ConnectivityMode) else v
    return {
        "scenario": top,
        "rf": {k: v for k, v in dataclasses.asdict(cfg.rf).items() if v is not None},
        "limits": dataclasses.asdict(cfg.limits),
        "qos": dataclasses.asdict(cfg.qos),
        "energy": dataclasses.asdict(cfg.energy),
    }


def load_config(path):
    import tomli

    try:
        with open(path, "rb") as fh:
            data = tomli.load(fh)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return config_from_dict(data)


def save_config(cfg, path):
    import tomli_w

    with open(path, "wb") as fh:
        tomli_w.dump(config_to_dict(cfg), fh)
