"""Diagonal measurements, information-bounded toy states, exact CHSH bounds
and context checking for Hardy / Frauchiger-Renner style inference chains."""

from .observable_algebra import (MINUS, PLUS, DerivedMeasurement, MeasurementTable, Outcome,
                                 diagonal_measurement, find_matching_row, lawvere_check, negate,
                                 xor_compose)
from .toy_states import (EpistemicState, ObservableId, Proposition, entangled_state, infer, measure,
                         supports_counterfactual)
from .lhv_bell import CorrelationSet, HiddenVariableModel, chsh, expectation, feasible, marginal
from .quantum_engine import (Basis, QubitPairState, born, certain_conditionals, change_basis,
                             chsh_quantum, hardy_state, u_not_fixed_point_check)
from .context_reasoner import (InferenceStep, ReasoningChain, Verdict, epr_demo, fr_demo, hardy_demo,
                               validate_chain, validate_step)

__version__ = "0.1.0"
