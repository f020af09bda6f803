"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Two objects that must live on the same domain do not."""


class ParameterError(ValueError):
    """An argument is outside its documented range."""


class StructureError(ValueError):
    """A composite object (file, pairing, polyhedron) is malformed."""


class SolverError(RuntimeError):
    """The feasibility solver failed to converge.

    Carries a short digest of the offending instance so failing runs can be
    reproduced from batch logs.
    """

    def __init__(self, message: str, digest: str = ""):
        super().__init__(f"{message} [instance {digest}]" if digest else message)
        self.digest = digest
