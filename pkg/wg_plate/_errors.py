""" Exception types raised by the solver """


class WgPlateError(Exception):
    """ Base class for every error raised by wg_plate """


class MeshParseError(WgPlateError, ValueError):
    """ Malformed mesh file. Carries the offending line number (1-based) """

    def __init__(self, message, line=None):
        if line is not None:
            message = "line {line}: {message}".format(line=line, message=message)
        super().__init__(message)
        self.line = line


class GeometryError(WgPlateError, ValueError):
    """ Degenerate or inverted cell """


class ContractError(WgPlateError, ValueError):
    """ Arguments that do not belong together (sizes, meshes, edge kinds) """


class QuadratureError(WgPlateError, ValueError):
    """ Requested quadrature exactness is not available """


class FactorizationError(WgPlateError, ArithmeticError):
    """ Non positive pivot during the SPD factorization """

    def __init__(self, message, pivot=None):
        super().__init__(message)
        self.pivot = pivot
