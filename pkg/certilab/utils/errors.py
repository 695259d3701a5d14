class CertilabError(Exception):
    """Base class for all certilab errors"""


class ArgumentError(CertilabError, ValueError):
    """Invalid argument or violated construction invariant"""


class CapExceededError(ArgumentError):
    """Problem size beyond the configured qubit caps"""


class ScenarioError(CertilabError):
    """Scenario file could not be parsed or validated"""
