"""Exception types shared across the solver."""


class ConfigError(Exception):
    """Invalid run configuration (bad key, bad value, bad combination)."""


class SnapshotError(Exception):
    """Snapshot file is malformed or truncated."""


class UnphysicalStateError(Exception):
    """A non-positive density or pressure survived every fallback rung.

    Attributes:
        kind: "density" or "pressure".
        stage: pipeline stage that detected it ("cell_average",
            "reconstruction", "point_values", "time_integration").
        location: (i, j, k) grid index (ghosted) closest to the failure.
    """

    def __init__(self, kind, stage, location=None):
        self.kind = kind
        self.stage = stage
        self.location = location
        where = f" at {location}" if location is not None else ""
        super().__init__(f"non-positive {kind} in stage '{stage}'{where}")
