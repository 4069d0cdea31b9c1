"""Online ad allocation with free disposal and an ad exchange."""

from .algorithms import (
    RunResult,
    StepTrace,
    expand_to_unit_capacities,
    replay,
    reserve_price,
    run,
    run_alg1,
    run_alg2,
    run_alg3,
    run_alg4,
    run_reserve,
)
from .auction import AuctionOutcome, BidAuction, first_price, satisfies_property_p, second_price
from .certify import CertReport, certify, check_prop1
from .ledger import Ledger, beta_of, capacity_weight, check_beta_update_bound
from .matcher import best_valid_assignment, exhaustive_valid_assignment
from .model import (
    EXCHANGE,
    Advertiser,
    Assignment,
    Impression,
    Instance,
    RevenueReport,
    is_valid_assignment,
    revenue_of,
    validate_instance,
)
from .offline import opt_decomposition, opt_multi_slot_bruteforce, opt_single_slot, optimum

__version__ = "0.1.0"
