"""graspgen: pixel-wise antipodal grasp detection toolkit."""

__version__ = "0.1.0"
