from src.utils.errors import ValidationError
from src.utils.pylogger import ContextLogger
from src.utils.rich_utils import print_config_tree, print_report_table
from src.utils.rng import SeedLike, child_seed, make_rng
from src.utils.utils import exit_code_for, extras, task_wrapper
