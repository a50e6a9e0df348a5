from typing import Literal


CheckStatus = Literal["pass", "fail", "skipped"]
