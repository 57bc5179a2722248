class ModTVError(Exception):
    pass


class ParameterError(ModTVError, ValueError):
    pass


class DimensionError(ModTVError, ValueError):
    def __init__(self, expected: int, actual: int, what: str = "vector"):
        super().__init__("%s has length %d, expected %d" % (what, actual, expected))

        self.expected = expected
        self.actual = actual


class CacheError(ModTVError):
    pass


class SolverError(ModTVError):
    pass


class LineSearchError(SolverError):
    pass


class OracleError(ModTVError):
    pass
