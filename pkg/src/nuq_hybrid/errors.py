"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """An argument is outside the domain an operation accepts."""


class InvalidProfile(ValueError):
    """A spatial-lobe profile violates a quantized-coverage constraint."""


class InvalidConfiguration(ValueError):
    """Array, RF-chain or path counts that a design routine cannot realize."""
