"""
UE report representation and RSSI derivation.

RSSI is the wideband received power over the N resource blocks of the
measurement bandwidth; it relates to the per-resource-element RSRP and to RSRQ as

    RSSI[dBm] = RSRP[dBm] + 10 log10(N) - RSRQ[dB]

RSRQ is a signed dB value (normally negative); SINR is carried through unchanged.
"""
import math
from dataclasses import asdict, dataclass
from typing import List, Optional

from .conf import get_setting
from .exceptions import ValidationError
from .forms import UeReportForm, form_violations


@dataclass(frozen=True)
class UeReport:
    rsrp: float
    rsrq: float
    n_prb: int = 20
    sinr: Optional[float] = None
    pci: Optional[int] = None
    timestamp: float = 0.0

    @classmethod
    def with_default_prb(cls, rsrp, rsrq, n_prb=None, **kwargs):
        """Build a report, substituting the configured PRB count when ``n_prb`` is missing."""
        if n_prb is None:
            n_prb = get_setting('DEFAULT_N_PRB')
        return cls(rsrp=rsrp, rsrq=rsrq, n_prb=n_prb, **kwargs)


def validate_report(r: UeReport) -> List[str]:
    """Every violated report constraint; an empty list means the report is valid."""
    return form_violations(UeReportForm(data=asdict(r)))


def rssi_from_report(r: UeReport) -> float:
    violations = validate_report(r)
    if violations:
        raise ValidationError("invalid UE report: " + "; ".join(violations))
    return r.rsrp + 10.0 * math.log10(r.n_prb) - r.rsrq


def rsrp_from_rssi(rssi: float, rsrq: float, n_prb: int) -> float:
    """Inverse of :func:`rssi_from_report` for a known RSRQ and PRB count."""
    if n_prb < 1:
        raise ValidationError("n_prb ≥ 1")
    return rssi - 10.0 * math.log10(n_prb) + rsrq
