"""Error type shared by every module.

Every failure carries a short machine-readable ``code`` string.  The CLI maps
codes to exit statuses: validation problems exit with 2, violated
mathematical preconditions with 3, insufficient truncation with 4.
"""

VALIDATION_CODES = frozenset({
    "BAD_INPUT",
    "CONDUCTOR_MISMATCH",
    "BACKEND_MISMATCH",
    "TRUNCATION_MISMATCH",
})

TRUNCATION_CODES = frozenset({"TRUNCATION_TOO_LOW"})


class FormalError(Exception):
    """A failure with a stable code, a message and optional details."""

    def __init__(self, code, message="", **details):
        super().__init__(f"{code}: {message}" if message else code)
        self.code = code
        self.message = message
        self.details = details

    @property
    def exit_code(self):
        if self.code in VALIDATION_CODES:
            return 2
        if self.code in TRUNCATION_CODES:
            return 4
        return 3

    def to_json(self):
        out = {"error": self.code, "message": self.message}
        if self.details:
            out["details"] = {k: str(v) for k, v in self.details.items()}
        return out
