"""Exception types shared across the package."""


class CssgenError(Exception):
    """Base class for package-specific failures."""


class TailTooHeavy(CssgenError):
    """A truncated photon-number expansion carries non-negligible mass near the cutoff."""


class NotNormalized(CssgenError):
    """An operation required a unit-norm state and got one that is not."""


class DegenerateSuperposition(CssgenError):
    """Destructive interference drove a superposition's norm to (numerical) zero."""


class AllOutcomesDegenerate(CssgenError):
    """Every measurement-outcome grid point produced a degenerate conditional state."""


class TargetUnbuildable(CssgenError):
    """A target-state specification could not be realized at the requested truncation."""


class ConfigError(CssgenError):
    """A run configuration failed schema validation or is internally inconsistent."""
