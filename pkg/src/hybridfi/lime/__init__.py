from .explainer import FeatureStats, LimeConfig, LocalExplanation, explain_local, kernel_weight, perturb
from .lasso import lasso_objective, weighted_lasso
from .ranking import GlobalRanking, PickConfig, global_ranking
from .submodular import coverage, global_importance, greedy_cover, submodular_pick
