"""Error types. Each carries the CLI exit code it maps to."""


class SolError(Exception):
    exit_code = 2

    @property
    def kind(self) -> str:
        return type(self).__name__


class InvalidHyperbolic(SolError):
    pass


class MissingRoot(SolError):
    pass


class MissingReverser(SolError):
    pass


class ParamOutOfSpace(SolError):
    pass


class InconsistentAux(SolError):
    pass


class CaseMismatch(SolError):
    pass


class RelationViolated(SolError):
    def __init__(self, relation: str, detail: str = ""):
        self.relation = relation
        super().__init__(f"relation {relation} fails" + (f": {detail}" if detail else ""))


class NotBijective(SolError):
    pass


class InconsistentParity(SolError):
    pass


class InvalidDatum(SolError):
    pass


class InvalidInput(SolError):
    pass


class CertificateRejected(SolError):
    exit_code = 3


class CounterexampleFound(SolError):
    exit_code = 3


class BoundExhausted(SolError):
    exit_code = 4
