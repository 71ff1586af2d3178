class DirregError(Exception):
    """Base error; `detail` is shown to the user and `exit_code` ends the process."""

    def __init__(self, detail: str, exit_code: int = 1):
        super().__init__(detail)
        self.detail = detail
        self.exit_code = exit_code


class RepresentationError(DirregError):
    pass


class ScopeError(DirregError):
    pass


class InstanceError(DirregError):
    pass


class CoveringStepError(DirregError):
    def __init__(self, detail: str, iterate: int):
        super().__init__(detail)
        self.iterate = iterate


class ConsistencyError(DirregError):
    pass
