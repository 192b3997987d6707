from dataclasses import dataclass


class BearingNetworkError(ValueError):
    """Base class for every domain error raised by the toolkit."""

    code = "BearingNetworkError"


@dataclass(frozen=True)
class ValidationIssue:
    code: str
    message: str


class NetworkValidationError(BearingNetworkError):
    code = "InvalidNetwork"

    def __init__(self, issues):
        self.issues = tuple(issues)
        super().__init__("; ".join(f"{i.code}: {i.message}" for i in self.issues))

    @property
    def codes(self):
        return [issue.code for issue in self.issues]


class MalformedNetwork(BearingNetworkError):
    code = "MalformedNetwork"


class CollocatedNodes(BearingNetworkError):
    code = "CollocatedNodes"


class CollocatedEstimates(BearingNetworkError):
    code = "CollocatedEstimates"


class MissingPositions(BearingNetworkError):
    code = "MissingPositions"


class ZeroVector(BearingNetworkError):
    code = "ZeroVector"


class NotUnit(BearingNetworkError):
    code = "NotUnit"


class AsymmetricInput(BearingNetworkError):
    code = "AsymmetricInput"


class RankDisagreement(BearingNetworkError):
    code = "RankDisagreement"

    def __init__(self, rank_laplacian, rank_rigidity):
        self.rank_laplacian = rank_laplacian
        self.rank_rigidity = rank_rigidity
        super().__init__(
            f"rank(B)={rank_laplacian} but rank of the rigidity matrix is "
            f"{rank_rigidity}; the rank tolerance cannot separate them"
        )


class TooFewAnchors(BearingNetworkError):
    code = "TooFewAnchors"


class InternalInconsistency(BearingNetworkError):
    code = "InternalInconsistency"


class SingularSystem(BearingNetworkError):
    code = "SingularSystem"


class SingularPerturbedSystem(BearingNetworkError):
    code = "SingularPerturbedSystem"


class StepTooLarge(BearingNetworkError):
    code = "StepTooLarge"


class InvalidAngle(BearingNetworkError):
    code = "InvalidAngle"


class IllConditioned(UserWarning):
    """The follower block is solvable but its condition number is huge."""
