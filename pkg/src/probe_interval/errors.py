"""Exception types shared across the package."""


class InvalidInput(ValueError):
    """An argument violates a documented precondition."""


class MalformedInput(InvalidInput):
    """A graph or matrix file could not be parsed."""


class NonIndependentNonProbes(InvalidInput):
    """Two non-probes are joined by an edge."""


class RefusedTooLarge(RuntimeError):
    """A brute-force routine was asked to exceed its size budget."""


class RefusedParams(ValueError):
    """Generator parameters admit no instance."""


class Rejected(Exception):
    """The graph has no probe interval model.

    ``stage`` names the pipeline step that found the obstruction and
    ``detail`` describes it.
    """

    def __init__(self, stage: str, detail: str = ""):
        super().__init__(f"{stage}: {detail}" if detail else stage)
        self.stage = stage
        self.detail = detail
