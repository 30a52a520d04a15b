"""Exception types shared across the package."""


class ConfigError(ValueError):
    """The experiment configuration is malformed or internally inconsistent."""


class UnsupportedInputError(ValueError):
    """The photon input configuration is outside the supported range."""


class DivergenceError(RuntimeError):
    """A task generator produced an unbounded trajectory."""
