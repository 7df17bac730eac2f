DEFAULT_SEED = 20220131
DEFAULT_MC_SIZE = 10_000_000
# Seed of the κ_{p,β} and L(p,u,β) Monte Carlo integrals
DEFAULT_MC_SEED = 8675309

# Stable law of the driving process, Lévy density A|x|^(-1-β)
DEFAULT_BETA = 1.5
DEFAULT_STABLE_SCALE = 1.0

# Sampling durations φ = (φ' ∨ floor) / E[φ' ∨ floor], φ' ~ Exp(rate)
DEFAULT_PHI_RATE = 1.0
DEFAULT_PHI_FLOOR = 0.1

# Intensity dλ = speed (level - λ) dt + vol dW~
DEFAULT_LAMBDA_LEVEL = 5.0
DEFAULT_LAMBDA_SPEED = 1.0
DEFAULT_LAMBDA_VOL = 1.0
DEFAULT_LAMBDA_INIT = 1.0
DEFAULT_LAMBDA_CLAMP = 0.05
LAMBDA_SUBSTEP_DIVISOR = 5

# dα = speed (level - α) dt + vol dW, dσ = α dW
DEFAULT_X0 = 1.0
DEFAULT_ALPHA0 = 1.0
DEFAULT_SIGMA0 = 1.0
DEFAULT_ALPHA_SPEED = 2.0
DEFAULT_ALPHA_LEVEL = 1.0
DEFAULT_ALPHA_VOL = 2.0
DEFAULT_EULER_DIVISOR = 5

DEFAULT_HORIZON = 1.0
DEFAULT_DELTA_INV = 1000

# Estimator tuning rules, u_n = u_scale N^-ϱ, k_n = ⌈N^ϖ⌉, r_n = ⌈N^ψ⌉
DEFAULT_P = 0.5
DEFAULT_RHO = 0.5
DEFAULT_U_EXPONENT = 1.0 / 3.0
DEFAULT_U_SCALE = 1.0
DEFAULT_K_EXPONENT = 2.0 / 3.0
DEFAULT_R_EXPONENT = 4.0 / 5.0
DEFAULT_BETA_CLAMP = (1.01, 1.99)
CI_LEVEL = 0.95

# Study grid of the reference simulation design
DEFAULT_BETAS = (1.1, 1.3, 1.5, 1.7, 1.9)
DEFAULT_RHOS = (0.5, 2.0)
DEFAULT_N_REPS = 1000
MAX_FAILURE_RATE = 0.5
MIN_QQ_POINTS = 10

WORKERS_ENV_VAR = "PYJAI_WORKERS"

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG_ERROR = 2
EXIT_DATA_ERROR = 3
EXIT_DEGENERATE = 4

TICK_HEADER = ("time", "price")
SCHEME_HEADER = ("index", "tau", "lambda_at_tau", "phi")
STUDY_HEADER = (
    "beta",
    "rho",
    "delta_inv",
    "mean",
    "emp_var",
    "theo_var",
    "n_failed",
    "mean_n_obs",
)
QQ_HEADER = ("theoretical_q", "sample_q")
NOT_AVAILABLE = "NA"
MACHINE_DIGITS = 17
HUMAN_DIGITS = 4
