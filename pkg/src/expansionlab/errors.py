"""Exception hierarchy shared by all modules."""


class ExpansionLabError(Exception):
    pass


class NotUnimodular(ExpansionLabError, ValueError):
    pass


class ZeroInput(ExpansionLabError, ValueError):
    pass


class NotADivisor(ExpansionLabError, ValueError):
    pass


class ModulusMismatch(ExpansionLabError, ValueError):
    pass


class NotInKernel(ExpansionLabError, ValueError):
    pass


class BadLevels(ExpansionLabError, ValueError):
    pass


class TooLarge(ExpansionLabError):
    pass


class NoConvergence(ExpansionLabError):
    def __init__(self, msg, estimate=None):
        super().__init__(msg)
        self.estimate = estimate


class DomainEmpty(ExpansionLabError, ValueError):
    pass


class BadSet(ExpansionLabError, ValueError):
    pass


class BadHypothesis(ExpansionLabError, ValueError):
    pass


class SmallPrime(ExpansionLabError, ValueError):
    pass


class NoConjugatorFound(ExpansionLabError):
    pass


class UnsupportedCharacteristic(ExpansionLabError, ValueError):
    pass


class ConfigError(ExpansionLabError, ValueError):
    pass
