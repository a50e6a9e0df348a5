from .output_format import OutputFormat
from .check_status import CheckStatus
from .variety import VarietyIn, VarietyKind, VarietySpec, VARIETY_LABELS, VARIETY_PARAMETERS, parse_variety
from .check_kind import CheckKind, CHECK_OPERATIONS, NEEDS_ODD_PART, NEEDS_TATE_ODD
