"""Constants for the henon_morse package."""

DOMAIN = "henon_morse"

DEFAULT_ODE_TOLERANCE = 1e-10
DEFAULT_EIGEN_TOLERANCE = 1e-8
DEFAULT_IDENTITY_TOLERANCE = 1e-6
DEFAULT_RESIDUAL_TOLERANCE = 1e-6
DEFAULT_CORRESPONDENCE_TOLERANCE = 1e-6
DEFAULT_SCALING_TOLERANCE = 1e-4
DEFAULT_BLOWUP_BOUND = 1e8
DEFAULT_GRID_POINTS = 4000
MIN_GRID_POINTS = 16
DEFAULT_MAX_BISECTIONS = 200
DEFAULT_MAX_EXPANSIONS = 60
DEFAULT_SERIES_CUTOFF = 1e-5
DEFAULT_IVP_WINDOW = 10.0
MAX_IVP_WINDOW = 1e6
DEFAULT_MIN_EIGENVALUES = 8
DEFAULT_SEED = 20240229
DEFAULT_TRIAL_COUNT = 100
DEFAULT_TRIAL_MAX_MODE = 5
DEFAULT_TRIAL_DEGREE = 3
PROP31_SLACK = 1e-10
RADIAL_EQUALITY_TOLERANCE = 1e-8
NONDEGENERACY_FACTOR = 10.0
ANGULAR_SAMPLES = 256
DEFAULT_JACOBIAN_POINTS = 1000

ENV_THREADS = "HENON_MORSE_THREADS"

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_SOLVER_FAILED = 2
EXIT_USAGE = 3

CONF_ALPHA = "alpha"
CONF_P = "p"
CONF_NODAL = "nodal"
CONF_DOMAIN = "domain"
CONF_GRID = "grid"
CONF_KAPPA = "kappa"
CONF_MODES = "modes"
CONF_WEIGHTED = "weighted"
CONF_ODE_TOLERANCE = "ode_tolerance"
CONF_EIGEN_TOLERANCE = "eigen_tolerance"
CONF_IDENTITY_TOLERANCE = "identity_tolerance"
CONF_BLOWUP_BOUND = "blowup_bound"
CONF_MAX_BISECTIONS = "max_bisections"
CONF_SEED = "seed"
CONF_SAMPLES = "samples"
CONF_THREADS = "threads"
CONF_PROFILE = "profile"
CONF_OUT = "out"
CONF_EMIT_PLOTS = "emit_plots"
CONF_PRETTY = "pretty"
CONF_ALL_EVEN_UPTO = "all_even_upto"
CONF_METHOD = "method"
CONF_FORMAT = "format"

METHOD_SHOOT = "shoot"
METHOD_SCALING = "scaling"
METHOD_RESCALE = "rescale"
SOLVE_METHODS = (METHOD_SHOOT, METHOD_SCALING, METHOD_RESCALE)

FORMAT_JSON = "json"
FORMAT_CSV = "csv"
REPORT_FORMATS = (FORMAT_JSON, FORMAT_CSV)

DEFAULT_SUITE_DIR = "suite"
SUITE_REPORT = "report.json"

PROFILE_CSV_HEADER = ("r", "u", "du")
SPECTRUM_CSV_HEADER = ("k", "index", "lambda")
