"""Named error types raised across the toolkit.

Every failure carries the name of the module that raised it so the CLI can
report a structured message instead of a traceback.
"""


class ScatteringError(Exception):
    module = "halfscat"

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details

    @property
    def name(self):
        return type(self).__name__


# ode-core
class NonFinite(ScatteringError):
    module = "ode"


class ZeroK(ScatteringError):
    module = "ode"


# spectra
class BracketFailure(ScatteringError):
    module = "spectra"


class InternalInconsistency(ScatteringError):
    module = "spectra"


# scattering
class NearZeroJost(ScatteringError):
    module = "scattering"


class UnwrapAmbiguity(ScatteringError):
    module = "scattering"


class ScanTooCoarse(ScatteringError):
    module = "scattering"


class PoleHit(ScatteringError):
    module = "scattering"


# phase-map
class NotLPlus(ScatteringError):
    module = "phasemap"


class InvalidSpectralData(ScatteringError):
    module = "phasemap"


# recover
class DegenerateGamma(ScatteringError):
    module = "recover"


class SingularOmega(ScatteringError):
    module = "recover"


class EvenConditionViolated(ScatteringError):
    module = "recover"


class EigenvalueHit(ScatteringError):
    module = "recover"


# dressing
class ZeroA(ScatteringError):
    module = "dressing"


class NotAZero(ScatteringError):
    module = "dressing"


class WrongSign(ScatteringError):
    module = "dressing"


class SupportLeak(ScatteringError):
    module = "dressing"


# discrete-smap
class SpacingViolation(ScatteringError):
    module = "smap"


class IllConditioned(ScatteringError):
    module = "smap"


class NoConvergence(ScatteringError):
    module = "smap"

    def __init__(self, message, residual=None, potential=None, **details):
        super().__init__(message, residual=residual, **details)
        self.residual = residual
        self.potential = potential
