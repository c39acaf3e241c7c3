"""Sample-batch and curve persistence."""
