"""Collection of bwelab exceptions.

Every exception carries an ``exit_code`` which the command line interface uses
as its process exit status.
"""


class BweError(Exception):
    """Base class for all bwelab errors."""

    exit_code = 1


class ConfigurationError(BweError, ValueError):
    """Exception for invalid configuration values, names or tags."""

    exit_code = 2

    def __init__(self, name, value=None, valid=None):
        message = 'Invalid value for {}: {}.'.format(name, value)
        if valid:
            message += ' Valid values are: {}.'.format(', '.join(str(v) for v in valid))
        super(ConfigurationError, self).__init__(message)
        self.name = name
        self.value = value


class ContractViolationError(BweError):
    """Exception for calls that break an operation's preconditions."""

    exit_code = 3


class DataError(BweError):
    """Base class for errors in datasets, parameter files and reports."""

    exit_code = 3


class VersionMismatchError(DataError):
    """Exception for loading a file written by an incompatible format version."""

    def __init__(self, file_path, found, expected):
        message = '{} has format version {} but version {} is expected.'.format(
            file_path, found, expected)
        super(VersionMismatchError, self).__init__(message)
        self.found = found
        self.expected = expected


class TruncatedFileError(DataError):
    """Exception for a file that ends before its declared content."""

    def __init__(self, file_path, offset):
        message = '{} is truncated at byte offset {}.'.format(file_path, offset)
        super(TruncatedFileError, self).__init__(message)
        self.offset = offset


class MalformedRecordError(DataError):
    """Exception for a record that cannot be parsed or misses required fields."""

    def __init__(self, file_path, line_number, reason):
        message = 'Malformed record in {} at line {}: {}'.format(
            file_path, line_number, reason)
        super(MalformedRecordError, self).__init__(message)
        self.line_number = line_number


class ArchitectureMismatchError(DataError):
    """Exception for parameters that do not match the expected architecture."""

    def __init__(self, field, found, expected):
        message = 'Policy {} mismatch: found {} but {} is expected.'.format(
            field, found, expected)
        super(ArchitectureMismatchError, self).__init__(message)


class EmptyDatasetError(DataError):
    """Exception for training or studying on a dataset without samples."""

    def __init__(self, what='dataset'):
        message = 'The {} is empty. At least one trajectory is required.'.format(what)
        super(EmptyDatasetError, self).__init__(message)


class LayoutMismatchError(DataError):
    """Exception for observations that do not follow the expected feature layout."""


class NumericalError(BweError):
    """Base class for numerical failures."""

    exit_code = 4


class EstimatorFaultError(NumericalError):
    """Exception for an estimator that returns a non-finite estimate."""

    def __init__(self, value, step, episode=None):
        message = 'Estimator returned {} at step {}'.format(value, step)
        if episode is not None:
            message += ' of episode {}'.format(episode)
        super(EstimatorFaultError, self).__init__(message + '.')
        self.value = value
        self.step = step
        self.episode = episode

    def with_episode(self, episode):
        """Return a copy of this error that names the episode index."""
        return EstimatorFaultError(self.value, self.step, episode)


class TrainingError(NumericalError):
    """Exception for a non-finite loss during training."""

    def __init__(self, loss, batch_index):
        message = 'Non-finite loss {} in batch {}.'.format(loss, batch_index)
        super(TrainingError, self).__init__(message)
        self.batch_index = batch_index


class DivergenceError(NumericalError):
    """Exception for a policy update that moved too far from the previous policy."""

    def __init__(self, kl, target, update):
        message = 'Mean KL {:.4g} exceeds 10x the target {:.4g} in update {}. ' \
            'Lower the learning rate or raise the initial KL penalty.'.format(
                kl, target, update)
        super(DivergenceError, self).__init__(message)
        self.kl = kl


class DegenerateSampleError(NumericalError):
    """Exception for statistics on samples that cannot support the test."""
