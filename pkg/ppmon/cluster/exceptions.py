class ClusteringParameterError(ValueError):
    """Raise when clustering is asked for something the data cannot give,
    such as more clusters than vectors."""
