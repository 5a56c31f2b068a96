"""Thermodynamic and information measures of decision-maker knowledge for
inconsistent pairwise-comparison (AHP) judgments."""

from ahpising.ensemble import (
    EnsembleObservables,
    EnumerationCapError,
    brute_force_partition,
    gibbs_weight,
    observables,
    partition_function,
    temperature_scan,
    transfer_matrix,
)
from ahpising.info import FisherReport, cost_of_information, discrete_fisher, shannon_entropy, strategy_fisher
from ahpising.market import (
    CommissionDecomposition,
    JudgmentMatrix,
    commission_from_bid_ask,
    cost_matrix,
    decompose,
    log_returns,
    priority_vector,
    transitivity_deviation,
    value_basket,
)
from ahpising.strategy import iverson, profit, spin_profit, spins
from ahpising.tropical import ClairvoyantResult, clairvoyant, max_profit, tropical_product

__version__ = "0.1.0"
