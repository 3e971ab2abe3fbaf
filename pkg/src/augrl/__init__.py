"""Off-policy RL with dynamics-invariant data augmentation on Goal2D."""

__version__ = "0.1.0"
