from typing import Literal


OutputFormat = Literal["text", "json"]
