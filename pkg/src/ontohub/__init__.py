"""Self-hosted ontology datahub: registry, views and dataset validation."""

__version__ = "0.1.0"
