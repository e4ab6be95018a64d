from ._criteria import entropy, gain_ratio
from ._forest import RandomForest, predict_forest, train_forest
from ._tree import (
    CategoricalSplit,
    DecisionTree,
    Leaf,
    Prediction,
    ThresholdSplit,
    predict_tree,
    train_tree,
)
from ._visualize import NodeInfo, render_tree

__all__ = [
    "CategoricalSplit",
    "DecisionTree",
    "Leaf",
    "NodeInfo",
    "Prediction",
    "RandomForest",
    "ThresholdSplit",
    "entropy",
    "gain_ratio",
    "predict_forest",
    "predict_tree",
    "render_tree",
    "train_forest",
    "train_tree",
]
