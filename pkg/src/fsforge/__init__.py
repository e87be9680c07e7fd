"""Hybrid resampling + feature-selection laboratory.

Phase 1 oversamples minority classes with SMOTE, drops synthetic instances
that Naive Bayes misclassifies and merges the survivors with the original
data.  Phase 2 keeps features with positive information gain and runs a
genetic wrapper search over them.  The evaluation harness scores a group of
five classifiers on the result.
"""

from .data import (AttributeSpec, Dataset, DataError, FoldPlan, Instance, ParseError,
                   impute_missing, load_arff, load_csv, stratified_folds)

__version__ = "0.1.0"

__all__ = [
    "AttributeSpec", "Dataset", "DataError", "FoldPlan", "Instance", "ParseError",
    "impute_missing", "load_arff", "load_csv", "stratified_folds",
]
