"""Exception hierarchy shared by all petrel modules."""
from __future__ import annotations


class PetrelError(Exception):
    """Base class for every error raised by this package."""


class Positioned(PetrelError):
    """An error anchored to a (line, column) position in the source text."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}" if line else message)
        self.message = message
        self.line = line
        self.col = col


# --- syntax ---------------------------------------------------------------

class SyntaxError(Positioned):
    """Input text does not match the grammar."""


class ScopeError(Positioned):
    """Reference to a name that is not declared at that point."""


class OrderError(Positioned):
    """A definition is used before it is introduced."""


class DuplicateName(Positioned):
    """Two module-level declarations share a name."""


class MissingQED(Positioned):
    """A proof step list does not end with a QED step."""


class DanglingStepReference(Positioned):
    """A BY clause names a step label that is not visible."""


# --- pluscal --------------------------------------------------------------

class PlusCalError(Positioned):
    """Base for algorithm-parsing and translation errors."""


class UnlabeledStatement(PlusCalError):
    """A statement that starts an atomic action has no label."""


class UnknownGotoTarget(PlusCalError):
    """goto names a label that does not exist."""


class AssignmentAfterBranch(PlusCalError):
    """An assignment follows a branching statement inside one action."""


class MultipleAssignSameVar(PlusCalError):
    """One action assigns the same variable twice."""


# --- kernel ---------------------------------------------------------------

class KernelError(PetrelError):
    pass


class PrimeOfTemporal(KernelError):
    """Prime applied to a temporal-level expression."""


class DoublePrime(KernelError):
    """Prime applied inside the scope of another prime."""


class UnknownDefinition(KernelError):
    """Expansion requested for a name with no definition."""


class ArityMismatch(KernelError):
    """Operator applied to the wrong number of arguments."""


class NotAQuantifiedDefinition(KernelError):
    """Bang-instantiation of a definition whose body is not a single
    bounded quantifier."""


class LevelError(KernelError):
    """Expression violates the constant/state/action/temporal discipline."""


# --- mcheck ---------------------------------------------------------------

class McheckError(PetrelError):
    pass


class ExecutionError(McheckError):
    """Evaluation failed (TLC-style runtime error).

    kind is a short tag such as 'incomparable-equality',
    'apply-outside-domain', 'arithmetic-on-non-integer',
    'non-boolean-condition', 'not-a-function', 'unbound-name'.
    """

    def __init__(self, kind: str, message: str, span=None, states=None):
        super().__init__(f"{kind}: {message}")
        self.kind = kind
        self.message = message
        self.span = span
        self.states = states or []


class UnboundedDomain(McheckError):
    """A quantifier or enumeration domain is not a finite evaluable set."""


class UnconstrainedVariable(McheckError):
    """A declared variable is never pinned or bounded by the predicate."""


class NotActionNormalForm(McheckError):
    """The next-state relation does not determine every primed variable."""


class StateLimitExceeded(McheckError):
    """Reachable-state exploration hit the configured limit."""


# --- proofman -------------------------------------------------------------

class ProofError(PetrelError):
    pass


class UnknownStepReference(ProofError):
    """A citation names a step that is not visible from the citing proof."""


class GoalMismatch(ProofError):
    """A QED step appears where no goal is in force."""


class DefBeforeUse(ProofError):
    """A DEF clause names a definition that is not in the context."""


# --- fpstore --------------------------------------------------------------

class CorruptStore(PetrelError, Warning):
    """Fingerprint store file is partly unreadable (warned about, never
    fatal: unreadable lines are skipped)."""
