from .statics import EquilibriumSolver, EquilibriumResult, SolveSettings
from .attainability.wrenchhull import WrenchHullAttainability, AttainabilityReport
from .attainability.search import SearchAttainability, SearchResult, SearchSettings
