"""Pure Nash equilibria of Plurality voting games with lazy or truth-biased voters."""

from .election import (
    ABSTAIN,
    Election,
    InvalidProfileError,
    Lottery,
    PrincipledProfile,
    ScoreBoard,
    TieRule,
    TrivialPolicy,
    derive_preference,
    expected_utility,
    lottery,
    scores,
)
from .game import (
    BudgetExceeded,
    GameSpec,
    PerturbedValue,
    Setting,
    enumerate_pne,
    is_pne,
    perturbed_utility,
    pne_outcomes,
)

__version__ = "0.1.0"
