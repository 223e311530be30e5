"""Counterfactual data augmentation toolkit for robust text classification.

Pipeline: train a bag-of-words classifier, find likely-causal terms via
closest-opposite-match search, substitute them with antonyms to generate
label-flipped counterfactual training samples, and retrain.
"""

__version__ = "0.1.0"
