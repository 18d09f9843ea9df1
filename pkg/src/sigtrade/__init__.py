"""Path-signature dynamic trading: signatures, lead-lag moments and mean-variance optimal strategies."""
from .errors import (AlphabetMismatchError, CapacityError, ConfigError, DataError,
                     DegenerateChannelError, InstabilityError, MissingWordError, OrderError,
                     ShapeError, SigTradeError, SingularMatrixError)
from .words import (Alphabet, LinearFunctional, concat, count_words, enumerate_words, pair,
                    shuffle, shuffle_functionals)
from .signature import (LeadLagPath, SampledPath, TruncatedSignature, chen_concat, lead_lag,
                        prefix_signatures, sig_segment, signature_of_path, time_augment)
from .market import MarketFactorPath, SampleSet, build_market_path, load_csv, window_samples
from .simulate import (SimConfig, macd, momentum_positions, simulate_pairs, simulate_samples,
                       simulate_signal_market)
from .moments import (ExpectedSignature, SigMoments, build_mu_sig, build_sigma_sig,
                      expected_signature, fit_moments, shift_letter)
from .optimize import FrontierPoint, SigStrategy, evaluate, frontier, perturb_cloud, solve
from .engine import BacktestResult, FitReport, aggregate_stats, backtest, learn_functional, positions

__version__ = "0.1.0"
