"""Exception hierarchy.

Every failure raised by the package derives from :class:`PhyloError`, split into
two families that the command line maps onto exit codes: syntax errors in
Newick text (``NewickSyntaxError``, always carrying a character position) and
structural errors in otherwise well-formed trees (``TreeStructureError``).
"""

from __future__ import annotations


class PhyloError(ValueError):
    """Base class for all errors raised by linf_cophenetic."""


# ---------------------------------------------------------------------------
# Newick syntax
# ---------------------------------------------------------------------------


class NewickSyntaxError(PhyloError):
    """Malformed Newick text.

    Attributes
    ----------
    position : int
        0-based character offset where parsing failed.
    expected : str
        Human readable description of what the parser wanted to see.
    """

    def __init__(self, message: str, position: int, expected: str = "") -> None:
        self.position = int(position)
        self.expected = expected
        self.message = message
        detail = f" (expected {expected})" if expected else ""
        super().__init__(f"{message} at position {self.position}{detail}")


class UnterminatedQuote(NewickSyntaxError):
    pass


class UnterminatedComment(NewickSyntaxError):
    pass


class MissingSemicolon(NewickSyntaxError):
    pass


class NegativeBranchLength(NewickSyntaxError):
    pass


# ---------------------------------------------------------------------------
# Tree structure
# ---------------------------------------------------------------------------


class TreeStructureError(PhyloError):
    """A tree, labeling or pair of trees violates a structural requirement."""


class CycleDetected(TreeStructureError):
    pass


class MultipleRoots(TreeStructureError):
    pass


class NoRoot(TreeStructureError):
    pass


class NonMonotoneEdge(TreeStructureError):
    pass


class NonFiniteHeight(TreeStructureError):
    pass


class InvalidNode(TreeStructureError):
    pass


class LabelCountMismatch(TreeStructureError):
    pass


class DuplicateLabel(TreeStructureError):
    def __init__(self, name: str) -> None:
        self.name = name
        super().__init__(f"duplicate leaf label {name!r}")


class EmptyLabel(TreeStructureError):
    pass


class UnnamedLeaf(TreeStructureError):
    pass


class NotUltrametric(TreeStructureError):
    pass


class MissingBranchLength(TreeStructureError):
    pass


class MissingHeightAnnotation(TreeStructureError):
    pass


class DimensionMismatch(TreeStructureError):
    pass


class LabelSetMismatch(TreeStructureError):
    pass


class NegativeEpsilon(PhyloError):
    pass


class InvalidTolerance(PhyloError):
    pass
