class ExportError(Exception):
    """Base class for exporter failures."""


class ValidationError(ExportError, ValueError):
    """Bad spec values or unusable inputs."""
