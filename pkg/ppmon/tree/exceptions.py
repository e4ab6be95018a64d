class TrainingDataError(ValueError):
    """Raise when a classifier cannot be trained on the given rows."""
