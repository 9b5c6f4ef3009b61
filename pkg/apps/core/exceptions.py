class AgeOfInformationError(Exception):
    """Root of every error raised by the apps packages."""


class InvalidPath(AgeOfInformationError, ValueError):
    """The loss probabilities do not describe a usable line network."""


class EmptyPath(InvalidPath):
    def __init__(self, message="A path needs at least one link."):
        super().__init__(message)


class ProbOutOfRange(InvalidPath):
    def __init__(self, index, value):
        self.index = index
        self.value = value
        super().__init__(
            f"Loss probability of link {index + 1} must lie in [0, 1), got {value!r}."
        )


class InfeasibleSchedule(InvalidPath):
    """Links do not fit into one sampling period."""


class DegenerateRates(AgeOfInformationError):
    """A closed form would divide by a (near) zero gap between loss probabilities."""


class HorizonOverflow(AgeOfInformationError):
    def __init__(self, horizon, cap):
        self.horizon = horizon
        self.cap = cap
        super().__init__(
            f"Truncation horizon {horizon} exceeds the cap of {cap} ages."
        )


class OutOfHorizon(AgeOfInformationError):
    def __init__(self, delta, delta_max):
        self.delta = delta
        self.delta_max = delta_max
        super().__init__(f"Age {delta} lies beyond the PMF horizon {delta_max}.")


class EmptySample(AgeOfInformationError):
    def __init__(self, message="The empirical distribution holds no samples."):
        super().__init__(message)


class InvalidSimConfig(AgeOfInformationError, ValueError):
    """Simulation parameters out of range."""


class UnnormalizedPmf(AgeOfInformationError, ValueError):
    def __init__(self, error):
        self.error = error
        super().__init__(f"Age probabilities and tail mass miss 1 by {error:.3e}.")
