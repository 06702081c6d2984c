from .runner import FIELDS, ResultRecord, read_results, run_experiment, write_results
from .spec import ExperimentSpec, SpecError, load_spec, parse_spec
from .verify import verify
