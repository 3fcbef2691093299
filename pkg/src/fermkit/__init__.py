"""fermkit: image filtering, texture descriptors, feature selection,
classifiers and population metaheuristics for facial-expression work."""

__version__ = "0.1.0"
