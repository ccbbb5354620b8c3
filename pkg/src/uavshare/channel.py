"""Large-scale link gains, unit conversions and Doppler bookkeeping.

The magnitude model is ``alpha = L_p * D**-phi * chi`` with log-normal
shadowing ``chi``. The Doppler phase rotation is assumed compensated, so it
is reported for information only and never enters a gain.
"""

from dataclasses import dataclass, field

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0


def db_to_linear(x, kind="ratio"):
    """Convert dB (``kind="ratio"``) or dBm (``kind="dbm"``) to linear units.

    dBm values come back in watts.
    """
    x = np.asarray(x, dtype=float)
    if kind == "ratio":
        out = 10.0 ** (x / 10.0)
    elif kind == "dbm":
        out = 10.0 ** ((x - 30.0) / 10.0)
    else:
        raise ValueError(f"unknown kind {kind!r}; expected 'ratio' or 'dbm'")
    return out if out.ndim else float(out)


def linear_to_db(x, kind="ratio"):
    """Inverse of :func:`db_to_linear`."""
    x = np.asarray(x, dtype=float)
    if kind == "ratio":
        out = 10.0 * np.log10(x)
    elif kind == "dbm":
        out = 10.0 * np.log10(x) + 30.0
    else:
        raise ValueError(f"unknown kind {kind!r}; expected 'ratio' or 'dbm'")
    return out if out.ndim else float(out)


def free_space_reference(carrier_freq):
    """Free-space path gain at 1 m, (lambda / 4 pi)^2."""
    wavelength = SPEED_OF_LIGHT / carrier_freq
    return (wavelength / (4.0 * np.pi)) ** 2


@dataclass(frozen=True)
class RfParams:
    """Radio parameters shared by every link of a scenario.

    Antenna gains (dBi) and receiver noise figures (dB) are folded into the
    effective link gains by :meth:`budget`, so the SINR expressions keep a
    single noise power ``noise_power``.
    """

    carrier_freq: float = 2e9
    pathloss_exponent: float = 2.0
    pathloss_factor: float | None = None
    noise_power: float = field(default_factory=lambda: db_to_linear(-114.0, "dbm"))
    sigma_rbs_db: float = 8.0
    sigma_uav_db: float = 3.0
    sigma_hap_db: float = 3.0
    gain_rbs_dbi: float = 8.0
    gain_uav_dbi: float = 3.0
    gain_hap_dbi: float = 8.0
    nf_rbs_db: float = 5.0
    nf_uav_db: float = 9.0
    nf_hap_db: float = 3.0

    def __post_init__(self):
        if self.pathloss_factor is None:
            object.__setattr__(
                self, "pathloss_factor", free_space_reference(self.carrier_freq)
            )
        if not self.pathloss_exponent > 0:
            raise ValueError("path-loss exponent must be positive")
        if not self.noise_power > 0:
            raise ValueError("noise power must be positive")
        if not self.pathloss_factor > 0:
            raise ValueError("path-loss factor must be positive")
        if not self.carrier_freq > 0:
            raise ValueError("carrier frequency must be positive")

    @property
    def wavelength(self):
        return SPEED_OF_LIGHT / self.carrier_freq

    def budget(self, tx, rx):
        """Linear antenna-gain / noise-figure factor for a tx -> rx link.

        ``tx`` is ``"uav"``; ``rx`` is one of ``"uav"``, ``"rbs"``, ``"hap"``.
        """
        gains = {"uav": self.gain_uav_dbi, "rbs": self.gain_rbs_dbi, "hap": self.gain_hap_dbi}
        nfs = {"uav": self.nf_uav_db, "rbs": self.nf_rbs_db, "hap": self.nf_hap_db}
        return db_to_linear(gains[tx] + gains[rx] - nfs[rx])


@dataclass(frozen=True)
class NodePosition:
    x: float
    y: float
    altitude: float
    speed: float = 0.0
    heading: float = 0.0

    def __post_init__(self):
        if self.altitude < 0:
            raise ValueError("altitude must be non-negative")
        if self.speed < 0:
            raise ValueError("speed must be non-negative")

    @property
    def xyz(self):
        return np.array([self.x, self.y, self.altitude], dtype=float)


@dataclass(frozen=True)
class LinkGain:
    alpha: float
    distance: float
    shadow: float


@dataclass(frozen=True)
class DopplerInfo:
    doppler_shift: float
    angle: float
    wavelength: float


@dataclass(frozen=True)
class PairGains:
    """The six large-scale gains of one candidate HCU-LCU sharing pair.

    Fields may be numpy arrays that broadcast against each other (e.g.
    ``(I, 1)`` HCU gains with ``(1, J)`` LCU gains), in which case every
    downstream closed form evaluates the whole I x J grid at once.
    """

    a_jj: float
    a_ij: float
    a_iR: float
    a_iH: float
    a_jR: float
    a_jH: float

    def __post_init__(self):
        for name in ("a_jj", "a_ij", "a_iR", "a_iH", "a_jR", "a_jH"):
            if not np.all(np.asarray(getattr(self, name)) > 0):
                raise ValueError(f"{name} must be strictly positive")

    def at(self, i, j):
        """Scalar PairGains for entry (i, j) of a broadcast grid."""
        def pick(v):
            v = np.asarray(v)
            if v.ndim == 0:
                return float(v)
            return float(np.broadcast_to(v, self.shape)[i, j])
        return PairGains(*(pick(getattr(self, n)) for n in
                           ("a_jj", "a_ij", "a_iR", "a_iH", "a_jR", "a_jH")))

    @property
    def shape(self):
        return np.broadcast_shapes(*(np.shape(getattr(self, n)) for n in
                                     ("a_jj", "a_ij", "a_iR", "a_iH", "a_jR", "a_jH")))


def path_gain(distance, rf, sigma_db, z):
    """Vectorised ``L_p * D**-phi * 10**(sigma * z / 10)``."""
    distance = np.asarray(distance, dtype=float)
    if np.any(distance <= 0):
        raise ValueError("degenerate geometry: link distance must be positive")
    shadow = 10.0 ** (sigma_db * np.asarray(z, dtype=float) / 10.0)
    return rf.pathloss_factor * distance ** (-rf.pathloss_exponent) * shadow


def large_scale_gain(tx, rx, rf, shadow_sigma_db, rng_draw):
    """Large-scale gain between two nodes for a given unit-normal draw."""
    distance = float(np.linalg.norm(tx.xyz - rx.xyz))
    if distance == 0.0:
        raise ValueError("degenerate geometry: tx and rx coincide")
    shadow = 10.0 ** (shadow_sigma_db * rng_draw / 10.0)
    alpha = rf.pathloss_factor * distance ** (-rf.pathloss_exponent) * shadow
    return LinkGain(alpha=alpha, distance=distance, shadow=shadow)


def doppler_shift(pos, los_angle, rf):
    """Doppler shift f_d = (v / lambda) cos(theta) of a moving node."""
    lam = rf.wavelength
    return DopplerInfo(
        doppler_shift=pos.speed / lam * np.cos(los_angle),
        angle=los_angle,
        wavelength=lam,
    )
