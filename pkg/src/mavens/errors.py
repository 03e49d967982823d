"""Exception types shared across the pipeline stages."""


class MavensError(Exception):
    """Base class for every error raised by this package."""


class InvalidInput(MavensError, ValueError):
    pass


class BackendUnavailable(MavensError):
    pass


class FixtureMiss(MavensError, KeyError):
    def __init__(self, key: str):
        super().__init__(key)
        self.key = key

    def __str__(self) -> str:
        preview = self.key if len(self.key) <= 120 else self.key[:117] + "..."
        return f"no mock fixture matches request: {preview!r}"


class GenerationFailure(MavensError):
    pass


class ExtractionFailure(MavensError):
    pass


class CurationFailure(MavensError):
    pass


class TranslationFailure(MavensError):
    pass


class RoleFailure(MavensError):
    pass


class LoadFailure(MavensError):
    pass


class FormatError(MavensError):
    pass


class AnalysisFailure(MavensError):
    pass


class UnparseableScore(MavensError):
    pass
