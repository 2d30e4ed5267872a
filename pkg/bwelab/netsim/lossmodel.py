"""Random packet loss processes of the bottleneck link."""
from .._frozen import frozen
from ..datatype import Probability, Tuple, Value
from .. import config


@frozen
class LossModel(object):
    """Packet loss model.

    Attributes:
        kind: none, iid or gilbert_elliott.
        iid_rate: Loss probability for iid loss.
        ge_params: (p_good_bad, p_bad_good, loss_in_bad) for the two-state
            Gilbert-Elliott chain. The good state never loses packets.

    Usage:

        burst = LossModel.gilbert_elliott()
        channel = burst.channel(numpy.random.default_rng(1))
        lost = channel.drop()
    """

    KINDS = ('none', 'iid', 'gilbert_elliott')

    kind = Value('kind', 'loss model kind', accepted_inputs=KINDS,
                 default_value='none')
    iid_rate = Probability('iid_rate', 'iid loss rate', default_value=0.0)
    ge_params = Tuple('ge_params', 'gilbert-elliott probabilities', valid_range=(0, 1),
                      tuple_size=3, default_value=(0.0, 1.0, 0.0))

    def __init__(self, kind='none', iid_rate=0.0, ge_params=None):
        self.kind = kind
        self.iid_rate = iid_rate
        self.ge_params = ge_params

    @classmethod
    def none(cls):
        return cls('none')

    @classmethod
    def iid(cls, rate):
        return cls('iid', iid_rate=rate)

    @classmethod
    def gilbert_elliott(cls, p_good_bad=None, p_bad_good=None, loss_in_bad=None):
        """Gilbert-Elliott loss with bwelab defaults for missing values."""
        s = config.settings
        params = (
            s.get('netsim.ge_p_good_bad') if p_good_bad is None else p_good_bad,
            s.get('netsim.ge_p_bad_good') if p_bad_good is None else p_bad_good,
            s.get('netsim.ge_loss_in_bad') if loss_in_bad is None else loss_in_bad
        )
        return cls('gilbert_elliott', ge_params=params)

    @property
    def mean_loss_rate(self):
        """Long-run loss rate of the model."""
        if self.kind == 'iid':
            return self.iid_rate
        if self.kind == 'gilbert_elliott':
            pgb, pbg, loss = self.ge_params
            if pgb + pbg == 0:
                return 0.0
            return pgb / (pgb + pbg) * loss
        return 0.0

    def channel(self, rng):
        """Create a stateful loss channel that draws from rng."""
        return LossChannel(self, rng)

    @classmethod
    def from_json(cls, data):
        return cls(data['kind'], data.get('iid_rate', 0.0), data.get('ge_params'))

    def to_json(self):
        return {'kind': self.kind, 'iid_rate': self.iid_rate,
                'ge_params': list(self.ge_params)}

    def __eq__(self, other):
        return isinstance(other, LossModel) and self.to_json() == other.to_json()

    def __ne__(self, other):
        return not self.__eq__(other)

    def __repr__(self):
        if self.kind == 'iid':
            return 'LossModel::iid::{}'.format(self.iid_rate)
        if self.kind == 'gilbert_elliott':
            return 'LossModel::gilbert_elliott::{}'.format(self.ge_params)
        return 'LossModel::none'


class LossChannel(object):
    """Per-packet loss decisions for a LossModel.

    The Gilbert-Elliott chain decides loss in the current state and then moves
    to the next state once per packet.
    """

    __slots__ = ('model', 'rng', 'bad')

    def __init__(self, model, rng):
        self.model = model
        self.rng = rng
        self.bad = False

    def drop(self):
        """Return True if the next packet is lost."""
        kind = self.model.kind
        if kind == 'none':
            return False
        if kind == 'iid':
            return bool(self.rng.random() < self.model.iid_rate)

        pgb, pbg, loss = self.model.ge_params
        lost = bool(self.bad and self.rng.random() < loss)
        if self.bad:
            self.bad = not (self.rng.random() < pbg)
        else:
            self.bad = bool(self.rng.random() < pgb)
        return lost
