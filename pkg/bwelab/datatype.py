# coding=utf-8
"""Descriptors for validated configuration fields."""
import warnings

__all__ = ['Number', 'Value', 'Tuple', 'Probability']


class Default(object):
    """The default descriptor for configuration fields.

    Provides base case attributes for other descriptors.

    Attributes:
        name: Required for all cases. Name of the attribute (e.g. 'batch_size').
        descriptive_name: Human-readable name used in error messages (e.g.
            'minibatch size'). Optional but strongly suggested.
        accepted_inputs: Optional. List of inputs that are permissible for this
            field. If the input is not in the list a ValueError will be raised.
        valid_range: Optional. A (min, max) tuple. Values outside the range
            raise a ValueError.
        default_value: Optional. Value returned when the field is not set.
    """

    __slots__ = ('_name', '_descriptive_name', '_accepted_inputs', '_default_value',
                 '_valid_range', '_nameString')

    def __init__(self, name, descriptive_name=None, accepted_inputs=None,
                 valid_range=None, default_value=None):
        self._name = "_" + name
        self._descriptive_name = descriptive_name
        self._accepted_inputs = accepted_inputs
        self._default_value = default_value
        if valid_range:
            assert isinstance(valid_range, (tuple, list)) and len(valid_range) == 2, \
                "The input for valid_range should be a tuple/list containing" \
                " expected minimum and maximum values"
            valid_range = sorted(valid_range)

        self._valid_range = valid_range

        self._nameString = "%s (%s)" % (name, descriptive_name) \
            if descriptive_name else name

    def __get__(self, instance, owner):
        if instance is None:
            return self
        return getattr(instance, self._name, self._default_value)

    def __set__(self, instance, value):
        value = self._default_value if value is None else value
        if value is not None and self._accepted_inputs:
            inputs = list(self._accepted_inputs)
            if value not in inputs:
                raise ValueError("The value for %s should be one of the"
                                 " following: %s. The provided value was %s"
                                 % (self._nameString,
                                    ",".join(map(str, inputs)), value))
        setattr(instance, self._name, value)

    def __repr__(self):
        return str(self._default_value)


class Value(Default):
    """A string value.

    Usage:
        architecture = Value('architecture', 'policy architecture',
                             accepted_inputs=('lstm', 'mlp'), default_value='lstm')
    """

    __slots__ = ()


class Number(Default):
    """An integer or floating point number.

    Attributes:
        check_positive: Optional. Check if the number is greater than or equal
            to zero.
        num_type: Optional. float or int. The value is stored in this type and
            a warning is issued if the conversion changes the number (for
            example 4.2 to 4).
    """

    __slots__ = ('_check_positive', '_type')

    def __init__(self, name, descriptive_name=None, valid_range=None,
                 accepted_inputs=None, num_type=float, check_positive=False,
                 default_value=None):
        Default.__init__(self, name, descriptive_name, accepted_inputs,
                         valid_range, default_value)
        self._check_positive = check_positive
        self._type = num_type

    def __set__(self, instance, value):
        value = self._default_value if value is None else value
        if value is None:
            setattr(instance, self._name, None)
            return

        var_name = self._nameString
        try:
            final_value = self._type(value)
        except (ValueError, TypeError):
            raise ValueError("The value for %s should be a number. "
                             "%s was specified instead." % (var_name, value))

        if final_value != value and not isinstance(value, str):
            warnings.warn("The expected type for %s is %s. The provided input %s "
                          "has been converted to %s." % (
                              var_name, self._type.__name__, value, final_value))

        if self._check_positive and final_value < 0:
            raise ValueError("The value for %s should be greater than 0."
                             " The value specified was %s." % (var_name, value))

        if self._valid_range:
            min_val, max_val = self._valid_range
            if not (min_val <= final_value <= max_val):
                raise ValueError(
                    "The specified input for %s is %s. This is beyond the valid "
                    "range. The value for %s should be between %s and %s." % (
                        var_name, final_value, var_name, min_val, max_val))

        Default.__set__(self, instance, final_value)


class Probability(Number):
    """A probability in [0, 1]."""

    __slots__ = ()

    def __init__(self, name, descriptive_name=None, default_value=None):
        Number.__init__(self, name, descriptive_name, valid_range=(0, 1),
                        num_type=float, default_value=default_value)


class Tuple(Default):
    """A numeric tuple like (0.6, 0.2, 0.2).

    Attributes:
        tuple_size: Optional. Number of values that are expected.
        num_type: Type of every member (Default: float).
        valid_range: Optional. Every member should be in this range.
    """

    __slots__ = ('_tuple_size', '_type')

    def __init__(self, name, descriptive_name=None, valid_range=None,
                 accepted_inputs=None, tuple_size=None, num_type=float,
                 default_value=None):
        Default.__init__(self, name, descriptive_name, accepted_inputs,
                         valid_range, default_value)
        self._tuple_size = tuple_size
        self._type = num_type

    def __set__(self, instance, value):
        value = self._default_value if value is None else value
        if value is None:
            setattr(instance, self._name, None)
            return
        var_name = self._nameString
        try:
            final_value = tuple(self._type(v) for v in value)
        except (ValueError, TypeError):
            raise ValueError("The value for %s should be a sequence of numbers. "
                             "%s was specified instead." % (var_name, value))

        if self._tuple_size and len(final_value) != self._tuple_size:
            raise ValueError("The number of values for %s should be %d. "
                             "%d values were specified." % (
                                 var_name, self._tuple_size, len(final_value)))

        if self._valid_range:
            min_val, max_val = self._valid_range
            for v in final_value:
                if not (min_val <= v <= max_val):
                    raise ValueError(
                        "The value %s in %s is beyond the valid range. Values "
                        "should be between %s and %s." % (v, var_name, min_val,
                                                          max_val))
        Default.__set__(self, instance, final_value)
