import logging
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .channel import ChannelRealization
from .exceptions import InvalidParameterError

logger = logging.getLogger(__name__)


class Scheme(str, Enum):
    GUS = "GUS"
    CUS = "CUS"
    RUS = "RUS"


@dataclass(frozen=True, eq=False)
class ScheduledPair:
    """The two scheduled users of a slot (or arrays of them for a batch).

    ``first`` ranks above ``second`` under the scheme's criterion; for RUS the
    member with the larger gain is ``first``.
    """

    first: Union[int, np.ndarray]
    second: Union[int, np.ndarray]
    scheme: Scheme
    gain_first: Union[float, np.ndarray]
    gain_second: Union[float, np.ndarray]


def _check_users(real: ChannelRealization):
    if real.K < 2:
        raise InvalidParameterError("K", f"two users are scheduled per slot, got K={real.K}")


def _pair_from_order(real: ChannelRealization, order: np.ndarray, scheme: Scheme) -> ScheduledPair:
    first = order[..., 0]
    second = order[..., 1]
    gain_first = np.take_along_axis(real.gains, first[..., None], axis=-1)[..., 0]
    gain_second = np.take_along_axis(real.gains, second[..., None], axis=-1)[..., 0]
    if first.ndim == 0:
        return ScheduledPair(int(first), int(second), scheme, float(gain_first), float(gain_second))
    return ScheduledPair(first, second, scheme, gain_first, gain_second)


def _top_two(criterion: np.ndarray) -> np.ndarray:
    # stable sort on the negated criterion keeps the lower index first on ties
    return np.argsort(-criterion, axis=-1, kind="stable")[..., :2]


def select_gus(real: ChannelRealization) -> ScheduledPair:
    """Greedy scheduling: the two largest channel gains."""
    _check_users(real)
    return _pair_from_order(real, _top_two(real.gains), Scheme.GUS)


def select_cus(real: ChannelRealization) -> ScheduledPair:
    """CDF-based scheduling: the two largest CDF values of the users' own gains."""
    _check_users(real)
    return _pair_from_order(real, _top_two(real.cdf_values), Scheme.CUS)


def select_rus(real: ChannelRealization, rng: np.random.Generator) -> ScheduledPair:
    """Uniformly random pair; roles are assigned by the larger gain."""
    _check_users(real)
    keys = rng.random(real.gains.shape)
    chosen = np.argsort(keys, axis=-1, kind="stable")[..., :2]
    chosen_gains = np.take_along_axis(real.gains, chosen, axis=-1)
    swap = chosen_gains[..., 1] > chosen_gains[..., 0]
    order = np.where(swap[..., None], chosen[..., ::-1], chosen)
    return _pair_from_order(real, order, Scheme.RUS)


def select_pair(real: ChannelRealization, scheme: Union[Scheme, str], rng: Optional[np.random.Generator] = None) -> ScheduledPair:
    scheme = Scheme(scheme)
    if scheme is Scheme.GUS:
        return select_gus(real)
    if scheme is Scheme.CUS:
        return select_cus(real)
    if rng is None:
        raise InvalidParameterError("rng", "random scheduling needs a random stream")
    return select_rus(real, rng)


def admission_histogram(trials: Union[ScheduledPair, Sequence[ScheduledPair]], K: int) -> np.ndarray:
    """
    Per-user scheduling frequency; every slot admits two users so the
    frequencies sum to 2.
    """
    pairs: Iterable[ScheduledPair] = [trials] if isinstance(trials, ScheduledPair) else list(trials)
    counts = np.zeros(K, dtype=np.int64)
    slots = 0
    for pair in pairs:
        first = np.atleast_1d(pair.first)
        second = np.atleast_1d(pair.second)
        counts += np.bincount(first, minlength=K)[:K]
        counts += np.bincount(second, minlength=K)[:K]
        slots += first.size
    if slots == 0:
        raise InvalidParameterError("trials", "at least one scheduled slot is required")
    return counts / slots
