"""lifecheck: finds lifetime annotations that let raw-pointer values outlive their source."""

__version__ = "0.1.0"
